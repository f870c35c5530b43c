/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/parametric_model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "nlrm/kernels.hpp"
#include "nlrm/rng.hpp"

namespace nlrm
{

ParameterBox::ParameterBox(Vector lo, Vector hi)
    : lo_(std::move(lo)), hi_(std::move(hi))
{
  if (lo_.size() != hi_.size() || lo_.size() == 0)
    throw std::invalid_argument("parameter box: bad dimensions");
  for (Eigen::Index j = 0; j < lo_.size(); ++j)
    if (!(lo_[j] < hi_[j]))
      throw std::invalid_argument("parameter box: need lo < hi");
}

ParameterBox ParameterBox::symmetric(int d, double half_width)
{
  return ParameterBox(Vector::Constant(d, -half_width),
                      Vector::Constant(d, half_width));
}

double ParameterBox::volume() const { return (hi_ - lo_).prod(); }

bool ParameterBox::contains(const Vector& y) const
{
  if (y.size() != lo_.size())
    return false;
  for (Eigen::Index j = 0; j < y.size(); ++j)
    if (y[j] < lo_[j] || y[j] > hi_[j])
      return false;
  return true;
}

bool ParameterBox::owns(const Vector& y, const ParameterBox& root) const
{
  if (y.size() != lo_.size())
    return false;
  for (Eigen::Index j = 0; j < y.size(); ++j)
  {
    if (y[j] < lo_[j])
      return false;
    if (hi_[j] == root.hi()[j] ? y[j] > hi_[j] : y[j] >= hi_[j])
      return false;
  }
  return true;
}

std::pair<ParameterBox, ParameterBox> ParameterBox::split(int i) const
{
  if (i < 0 || i >= dim())
    throw std::invalid_argument("split: coordinate out of range");
  const double mid = 0.5 * (lo_[i] + hi_[i]);
  Vector lo_hi = hi_, hi_lo = lo_;
  lo_hi[i] = mid;
  hi_lo[i] = mid;
  return {ParameterBox(lo_, lo_hi), ParameterBox(hi_lo, hi_)};
}

Vector ParameterBox::clip(const Vector& y) const
{
  return y.cwiseMax(lo_).cwiseMin(hi_);
}

std::string to_string(Partition p)
{
  switch (p)
  {
  case Partition::grid2x2:
    return "grid2x2";
  case Partition::grid4x4:
    return "grid4x4";
  case Partition::test1_partition1:
    return "test1_partition1";
  case Partition::test1_partition2:
    return "test1_partition2";
  }
  return "unknown";
}

Partition partition_from_string(std::string_view name)
{
  for (Partition p : {Partition::grid2x2, Partition::grid4x4,
                      Partition::test1_partition1, Partition::test1_partition2})
    if (to_string(p) == name)
      return p;
  throw std::invalid_argument("unknown partition '" + std::string(name) + "'");
}

std::vector<Rect> partition_cells(Partition p)
{
  auto grid = [](int k) {
    std::vector<Rect> cells;
    for (int b = 0; b < k; ++b)
      for (int a = 0; a < k; ++a)
        cells.push_back({double(a) / k, double(a + 1) / k, double(b) / k,
                         double(b + 1) / k});
    return cells;
  };
  switch (p)
  {
  case Partition::grid2x2:
    return grid(2);
  case Partition::grid4x4:
    return grid(4);
  case Partition::test1_partition1:
    return {{0.0, 0.75, 0.0, 0.75},
            {0.0, 0.75, 0.75, 1.0},
            {0.75, 1.0, 0.0, 0.75},
            {0.75, 1.0, 0.75, 1.0}};
  case Partition::test1_partition2:
    return {{0.25, 1.0, 0.25, 1.0},
            {0.25, 1.0, 0.0, 0.25},
            {0.0, 0.25, 0.25, 1.0},
            {0.0, 0.25, 0.0, 0.25}};
  }
  return {};
}

AffineModel::AffineModel(std::shared_ptr<const DiscreteSpace> space,
                         std::vector<SparseMatrix> A, std::vector<Vector> f,
                         ParameterBox box, std::optional<CoefficientField> field)
    : space_(std::move(space)), A_(std::move(A)), f_(std::move(f)),
      box_(std::move(box)), field_(std::move(field))
{
  if (A_.empty() || A_.size() != f_.size())
    throw std::invalid_argument("affine model: need d+1 operators and loads");
  if (box_.dim() != dim())
    throw std::invalid_argument("affine model: box dimension != d");
  const Eigen::Index n = space_->n_dof();
  for (std::size_t j = 0; j < A_.size(); ++j)
  {
    A_[j].makeCompressed();
    if (A_[j].rows() != n || A_[j].cols() != n || f_[j].size() != n)
      throw std::invalid_argument("affine model: dimension mismatch");
    if (A_[j].nonZeros() != A_[0].nonZeros())
      throw std::invalid_argument(
          "affine model: operators must share one sparsity pattern");
  }
}

SparseMatrix AffineModel::operator_at(const Vector& y) const
{
  if (y.size() != dim())
    throw std::invalid_argument("operator_at: parameter dimension mismatch");
  SparseMatrix A = A_[0];
  Eigen::Map<Vector> vals(A.valuePtr(), A.nonZeros());
  for (int j = 1; j <= dim(); ++j)
    if (y[j - 1] != 0.0)
      vals += y[j - 1] *
              Eigen::Map<const Vector>(A_[j].valuePtr(), A_[j].nonZeros());
  return A;
}

Vector AffineModel::rhs_at(const Vector& y) const
{
  Vector f = f_[0];
  for (int j = 1; j <= dim(); ++j)
    f += y[j - 1] * f_[j];
  return f;
}

std::vector<double> AffineModel::diffusivity(const Vector& y) const
{
  if (!field_)
    throw std::logic_error("diffusivity: model has no coefficient field");
  const Grid& grid = space_->grid();
  std::vector<double> a(grid.n_elements(), field_->abar);
  const auto cells = partition_cells(field_->partition);
  const auto& el = grid.elements();
  for (std::size_t e = 0; e < el.size(); ++e)
    for (std::size_t l = 0; l < cells.size(); ++l)
      if (cells[l].contains(el[e].cx, el[e].cy))
        a[e] += field_->c[l] * y[l];
  return a;
}

AffineModel build_model(std::shared_ptr<const DiscreteSpace> space,
                        Partition partition, double abar, const Vector& c,
                        std::optional<ParameterBox> box)
{
  const auto cells = partition_cells(partition);
  const int d = static_cast<int>(cells.size());
  if (c.size() != d)
    throw std::invalid_argument("build_model: partition " +
                                to_string(partition) + " needs " +
                                std::to_string(d) + " coefficients");
  if (abar - c.cwiseAbs().maxCoeff() <= 0.0)
    std::cerr << "warning: abar - max|c| <= 0, ellipticity may be lost\n";

  std::vector<SparseMatrix> A;
  std::vector<Vector> f;
  A.push_back(abar * space->stiffness());
  f.push_back(assemble_load(*space, 1.0));
  for (int l = 0; l < d; ++l)
  {
    auto w = indicator_weights(space->grid(), cells[l], c[l]);
    A.push_back(assemble_weighted_stiffness(*space, w));
    f.push_back(Vector::Zero(space->n_dof()));
  }
  ParameterBox Y = box ? *box : ParameterBox::symmetric(d);
  return AffineModel(std::move(space), std::move(A), std::move(f), Y,
                     CoefficientField{partition, abar, c});
}

EllipticityBounds ellipticity_bounds(const AffineModel& model)
{
  const auto& field = model.field();
  if (!field)
    throw std::logic_error(
        "ellipticity_bounds requires a piecewise-constant coefficient model");
  const ParameterBox& Y = model.box();
  double r = std::numeric_limits<double>::infinity();
  double R = -r;
  for (Eigen::Index l = 0; l < field->c.size(); ++l)
  {
    const double a_lo = field->abar + field->c[l] * Y.lo()[l];
    const double a_hi = field->abar + field->c[l] * Y.hi()[l];
    r = std::min({r, a_lo, a_hi});
    R = std::max({R, a_lo, a_hi});
  }
  if (field->c.size() == 0)
    r = R = field->abar;
  if (!(r > 0.0))
    throw std::domain_error("ellipticity lost on the parameter box (r <= 0)");
  return {r, R};
}

StateVector solve_state(const AffineModel& model, const Vector& y)
{
  if (!model.box().contains(y))
    throw std::out_of_range("solve_state: parameter outside the box");
  return SpdSolver(model.operator_at(y)).solve(model.rhs_at(y));
}

SnapshotSet sample_snapshots(const AffineModel& model, int n,
                             std::uint64_t seed)
{
  if (n < 1)
    throw std::invalid_argument("sample_snapshots: need n >= 1");
  Rng rng(seed);
  SnapshotSet set;
  set.seed = seed;
  set.parameters.reserve(n);
  const ParameterBox& Y = model.box();
  for (int i = 0; i < n; ++i)
  {
    Vector y(Y.dim());
    for (int j = 0; j < Y.dim(); ++j)
      y[j] = rng.uniform(Y.lo()[j], Y.hi()[j]);
    set.parameters.push_back(std::move(y));
  }
  set.states = kernels::solve_states(model, set.parameters);
  return set;
}

std::vector<int> mirror_permutation(const Grid& grid)
{
  const int n = grid.n_per_side();
  std::vector<int> perm(grid.n_dof());
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i)
      perm[grid.dof(i, j)] = grid.dof(n - j, n - i);
  return perm;
}

Vector mirror_parameter(const Vector& y)
{
  if (y.size() != 4)
    throw std::invalid_argument("mirror_parameter: Test-1 models have d = 4");
  Vector m = y;
  std::swap(m[1], m[2]);
  return m;
}

} // namespace nlrm
