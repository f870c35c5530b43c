/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_FEM_HPP
#define NLRM_FEM_HPP

#include <array>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace nlrm
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal coefficients of a function in the P1 space (interior nodes only).
using StateVector = Eigen::VectorXd;

/// Raised when a linear solve fails its contract (indefinite matrix or
/// residual above tolerance).
class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned rectangle [x0,x1] x [y0,y1] in the unit square.
struct Rect
{
  double x0, x1, y0, y1;

  bool contains(double x, double y) const
  {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
};

struct Triangle
{
  std::array<int, 3> nodes; // global node ids, i + j*(n_per_side+1)
  std::array<int, 3> dofs;  // -1 for boundary nodes
  double area;
  double cx, cy; // barycenter
};

/**
 * Uniform triangulation of the unit square. Each of the n_per_side^2 square
 * cells is split along its (i,j)-(i+1,j+1) diagonal. Degrees of freedom are
 * the interior nodes numbered row-major: dof(i,j) = (j-1)(n-1) + (i-1).
 */
class Grid
{
public:
  explicit Grid(int n_per_side);

  int n_per_side() const { return n_; }
  double h() const { return 1.0 / n_; }
  int n_dof() const { return (n_ - 1) * (n_ - 1); }
  int n_nodes() const { return (n_ + 1) * (n_ + 1); }
  std::size_t n_elements() const { return elements_.size(); }

  /// DOF index of node (i,j), or -1 on the boundary.
  int dof(int i, int j) const;
  int node(int i, int j) const { return i + j * (n_ + 1); }

  /// Coordinates of interior node with the given DOF index.
  std::array<double, 2> dof_coords(int dof) const;

  const std::vector<Triangle>& elements() const { return elements_; }

private:
  int n_;
  std::vector<Triangle> elements_;
};

Grid build_grid(int n_per_side);

/// Symmetric positive definite solver: sparse Cholesky with a preconditioned
/// CG fallback. Immutable after construction; solve() is safe to call
/// concurrently.
class SpdSolver
{
public:
  explicit SpdSolver(SparseMatrix A);

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& B) const;

  const SparseMatrix& matrix() const { return A_; }

private:
  SparseMatrix A_;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
};

/// Total number of SPD solves (right-hand sides) performed process-wide.
long spd_solve_count();

/**
 * The P1 space V_h with homogeneous Dirichlet conditions and its
 * V-inner product <u,v>_V = u^T K v, K the Laplacian stiffness matrix.
 */
class DiscreteSpace
{
public:
  explicit DiscreteSpace(Grid grid);

  const Grid& grid() const { return grid_; }
  int n_dof() const { return grid_.n_dof(); }

  const SparseMatrix& stiffness() const { return K_; }
  const SpdSolver& stiffness_solver() const { return *K_solver_; }

  double inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& u) const;

private:
  Grid grid_;
  SparseMatrix K_;
  std::unique_ptr<SpdSolver> K_solver_;
};

/// Per-element weights: value on elements whose barycenter lies in rect.
std::vector<double> indicator_weights(const Grid& grid, const Rect& rect,
                                      double value);

/// Assembles sum_T w_T * int_T grad(phi_i).grad(phi_j). The sparsity pattern
/// is always that of the full stiffness matrix (zero-weight entries are kept
/// structurally), so matrices from one grid share their value layout.
SparseMatrix assemble_weighted_stiffness(const DiscreteSpace& space,
                                         std::span<const double> weights);

/// constant * int phi_i, exact for P1.
Vector assemble_load(const DiscreteSpace& space, double constant);

Vector solve_spd(const SparseMatrix& A, const Vector& b);

/// Solves K g = functional. Then ||g||_V is the dual norm of the functional.
StateVector riesz_lift(const DiscreteSpace& space, const Vector& functional);

double v_inner(const DiscreteSpace& space, const StateVector& u,
               const StateVector& v);

} // namespace nlrm

#endif
