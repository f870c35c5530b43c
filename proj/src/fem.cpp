/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/fem.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>

namespace nlrm
{

namespace
{

std::atomic<long> g_spd_solves{0};

constexpr double kResidualTol = 1e-10;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double relative_residual(const SparseMatrix& A, const Vector& x,
                         const Vector& b)
{
  const double nb = b.norm();
  if (nb == 0.0)
    return (A * x).norm();
  return (A * x - b).norm() / nb;
}

} // namespace

Grid::Grid(int n_per_side) : n_(n_per_side)
{
  if (n_per_side < 4 || !is_power_of_two(n_per_side))
    throw std::invalid_argument(
        "grid size must be a power of two >= 4 so that quarter-aligned "
        "subdomains follow element edges; got " +
        std::to_string(n_per_side));

  const double h = 1.0 / n_;
  elements_.reserve(2 * static_cast<std::size_t>(n_) * n_);
  auto make = [&](std::array<std::array<int, 2>, 3> v) {
    Triangle t{};
    t.cx = t.cy = 0.0;
    for (int a = 0; a < 3; ++a)
    {
      t.nodes[a] = node(v[a][0], v[a][1]);
      t.dofs[a] = dof(v[a][0], v[a][1]);
      t.cx += v[a][0] * h / 3.0;
      t.cy += v[a][1] * h / 3.0;
    }
    t.area = 0.5 * h * h;
    elements_.push_back(t);
  };
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
    {
      make({{{i, j}, {i + 1, j}, {i + 1, j + 1}}});
      make({{{i, j}, {i + 1, j + 1}, {i, j + 1}}});
    }
}

int Grid::dof(int i, int j) const
{
  if (i <= 0 || j <= 0 || i >= n_ || j >= n_)
    return -1;
  return (j - 1) * (n_ - 1) + (i - 1);
}

std::array<double, 2> Grid::dof_coords(int d) const
{
  const int i = d % (n_ - 1) + 1;
  const int j = d / (n_ - 1) + 1;
  return {i * h(), j * h()};
}

Grid build_grid(int n_per_side) { return Grid(n_per_side); }

SpdSolver::SpdSolver(SparseMatrix A) : A_(std::move(A))
{
  llt_.compute(A_);
  if (llt_.info() != Eigen::Success)
    throw SolverError("matrix is not symmetric positive definite");
}

Vector SpdSolver::solve(const Vector& b) const
{
  if (b.size() != A_.rows())
    throw std::invalid_argument("solve: dimension mismatch");
  ++g_spd_solves;
  Vector x = llt_.solve(b);
  if (relative_residual(A_, x, b) <= kResidualTol)
    return x;

  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(10 * static_cast<int>(A_.rows()));
  cg.compute(A_);
  x = cg.solveWithGuess(b, x);
  if (relative_residual(A_, x, b) > kResidualTol)
    throw SolverError("SPD solve did not reach relative residual 1e-10");
  return x;
}

Matrix SpdSolver::solve(const Matrix& B) const
{
  Matrix X(B.rows(), B.cols());
  for (Eigen::Index c = 0; c < B.cols(); ++c)
    X.col(c) = solve(Vector(B.col(c)));
  return X;
}

long spd_solve_count() { return g_spd_solves.load(); }

DiscreteSpace::DiscreteSpace(Grid grid) : grid_(std::move(grid))
{
  std::vector<double> ones(grid_.n_elements(), 1.0);
  K_ = assemble_weighted_stiffness(*this, ones);
  K_solver_ = std::make_unique<SpdSolver>(K_);
}

double DiscreteSpace::inner(const Vector& u, const Vector& v) const
{
  if (u.size() != n_dof() || v.size() != n_dof())
    throw std::invalid_argument("v_inner: dimension mismatch");
  return u.dot(K_ * v);
}

double DiscreteSpace::norm(const Vector& u) const
{
  return std::sqrt(std::max(0.0, inner(u, u)));
}

std::vector<double> indicator_weights(const Grid& grid, const Rect& rect,
                                      double value)
{
  std::vector<double> w(grid.n_elements(), 0.0);
  const auto& el = grid.elements();
  for (std::size_t e = 0; e < el.size(); ++e)
    if (rect.contains(el[e].cx, el[e].cy))
      w[e] = value;
  return w;
}

SparseMatrix assemble_weighted_stiffness(const DiscreteSpace& space,
                                         std::span<const double> weights)
{
  const Grid& grid = space.grid();
  if (weights.size() != grid.n_elements())
    throw std::invalid_argument("weight vector does not match element count");

  const double h = grid.h();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * grid.n_elements());
  const auto& el = grid.elements();
  for (std::size_t e = 0; e < el.size(); ++e)
  {
    const Triangle& t = el[e];
    // Vertex coordinates recovered from node ids.
    std::array<double, 3> x, y;
    for (int a = 0; a < 3; ++a)
    {
      x[a] = (t.nodes[a] % (grid.n_per_side() + 1)) * h;
      y[a] = (t.nodes[a] / (grid.n_per_side() + 1)) * h;
    }
    // grad(lambda_a) = (b_a, c_a) / (2|T|)
    std::array<double, 3> b{y[1] - y[2], y[2] - y[0], y[0] - y[1]};
    std::array<double, 3> c{x[2] - x[1], x[0] - x[2], x[1] - x[0]};
    const double scale = weights[e] / (4.0 * t.area);
    for (int a = 0; a < 3; ++a)
    {
      if (t.dofs[a] < 0)
        continue;
      for (int q = 0; q < 3; ++q)
      {
        if (t.dofs[q] < 0)
          continue;
        trips.emplace_back(t.dofs[a], t.dofs[q],
                           scale * (b[a] * b[q] + c[a] * c[q]));
      }
    }
  }
  SparseMatrix A(grid.n_dof(), grid.n_dof());
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

Vector assemble_load(const DiscreteSpace& space, double constant)
{
  Vector f = Vector::Zero(space.n_dof());
  for (const Triangle& t : space.grid().elements())
    for (int a = 0; a < 3; ++a)
      if (t.dofs[a] >= 0)
        f[t.dofs[a]] += constant * t.area / 3.0;
  return f;
}

Vector solve_spd(const SparseMatrix& A, const Vector& b)
{
  return SpdSolver(A).solve(b);
}

StateVector riesz_lift(const DiscreteSpace& space, const Vector& functional)
{
  return space.stiffness_solver().solve(functional);
}

double v_inner(const DiscreteSpace& space, const StateVector& u,
               const StateVector& v)
{
  return space.inner(u, v);
}

} // namespace nlrm
