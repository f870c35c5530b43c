/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_PARAMETRIC_MODEL_HPP
#define NLRM_PARAMETRIC_MODEL_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlrm/fem.hpp"

namespace nlrm
{

/// Axis-aligned box of parameters, lo_j < hi_j.
class ParameterBox
{
public:
  ParameterBox() = default; // empty, d = 0
  ParameterBox(Vector lo, Vector hi);

  /// [-half_width, half_width]^d
  static ParameterBox symmetric(int d, double half_width = 1.0);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  Vector center() const { return 0.5 * (lo_ + hi_); }
  double volume() const;

  /// Closed containment.
  bool contains(const Vector& y) const;

  /// Half-open membership used to assign samples to cells of a partition of
  /// `root`: lo <= y < hi per coordinate, except that a face lying on the
  /// upper face of root is closed.
  bool owns(const Vector& y, const ParameterBox& root) const;

  /// Midpoint bisection along coordinate i (dyadic, exact in binary).
  std::pair<ParameterBox, ParameterBox> split(int i) const;

  Vector clip(const Vector& y) const;

  bool operator==(const ParameterBox& o) const
  {
    return lo_ == o.lo_ && hi_ == o.hi_;
  }

private:
  Vector lo_, hi_;
};

enum class Partition
{
  grid2x2,
  grid4x4,
  test1_partition1,
  test1_partition2,
};

std::string to_string(Partition p);
Partition partition_from_string(std::string_view name);

/// Subdomains D_1..D_d of the unit square for a partition.
std::vector<Rect> partition_cells(Partition p);

/// Piecewise-constant diffusivity a(y) = abar + sum_l c_l y_l 1_{D_l}.
struct CoefficientField
{
  Partition partition;
  double abar;
  Vector c;
};

/**
 * Affine family A(y) = A_0 + sum_j y_j A_j, f(y) = f_0 + sum_j y_j f_j on a
 * shared discrete space. All A_j share the stiffness sparsity pattern, so
 * A(y) is formed by combining value arrays.
 */
class AffineModel
{
public:
  AffineModel(std::shared_ptr<const DiscreteSpace> space,
              std::vector<SparseMatrix> A, std::vector<Vector> f,
              ParameterBox box, std::optional<CoefficientField> field = {});

  const DiscreteSpace& space() const { return *space_; }
  std::shared_ptr<const DiscreteSpace> space_ptr() const { return space_; }

  int dim() const { return static_cast<int>(A_.size()) - 1; }
  const SparseMatrix& A(int j) const { return A_[j]; }
  const Vector& f(int j) const { return f_[j]; }
  const ParameterBox& box() const { return box_; }
  const std::optional<CoefficientField>& field() const { return field_; }

  SparseMatrix operator_at(const Vector& y) const;
  Vector rhs_at(const Vector& y) const;

  /// Per-element diffusivity a(y); requires a coefficient field.
  std::vector<double> diffusivity(const Vector& y) const;

private:
  std::shared_ptr<const DiscreteSpace> space_;
  std::vector<SparseMatrix> A_;
  std::vector<Vector> f_;
  ParameterBox box_;
  std::optional<CoefficientField> field_;
};

/// Diffusion model -div(a(y) grad u) = 1 with A_0 = abar*K,
/// A_j = c_j * stiffness restricted to D_j, f_0 = load(1), f_j = 0.
/// The parameter box defaults to [-1,1]^d.
AffineModel build_model(std::shared_ptr<const DiscreteSpace> space,
                        Partition partition, double abar, const Vector& c,
                        std::optional<ParameterBox> box = {});

struct EllipticityBounds
{
  double r;
  double R;
};

/// Exact min/max of a(y) over the box; these bound A(y) in the H^1_0 energy
/// norm. Throws std::domain_error if r <= 0.
EllipticityBounds ellipticity_bounds(const AffineModel& model);

/// u(y). Parameters outside the box are rejected, not clamped.
StateVector solve_state(const AffineModel& model, const Vector& y);

struct SnapshotSet
{
  std::vector<Vector> parameters;
  Matrix states; // n_dof x N, column i solves parameters[i]
  std::uint64_t seed = 0;

  std::size_t size() const { return parameters.size(); }
};

/// n i.i.d. uniform draws on the model box (Rng stream), solved in
/// parallel.
SnapshotSet sample_snapshots(const AffineModel& model, int n,
                             std::uint64_t seed);

/// Node permutation of the reflection (x,y) -> (1-y, 1-x) across x+y=1:
/// (P u)[dof(i,j)] = u[dof(n-j, n-i)].
std::vector<int> mirror_permutation(const Grid& grid);

/// Parameter relabeling mapping the first Test-1 partition onto the mirror
/// image of the second (the middle two subdomains trade places).
Vector mirror_parameter(const Vector& y);

} // namespace nlrm

#endif
