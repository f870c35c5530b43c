/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/measurement.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nlrm/rng.hpp"

namespace nlrm
{

namespace
{

constexpr double kMaxGramCondition = 1e12;

// Snaps a coordinate to the grid; throws when it is not a node coordinate.
int to_node_index(double x, const Grid& grid, const char* what)
{
  const double s = x * grid.n_per_side();
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-9)
  {
    std::ostringstream msg;
    msg << "measurement box " << what << " " << x
        << " is not aligned with the mesh (h = " << grid.h() << ")";
    throw std::invalid_argument(msg.str());
  }
  return static_cast<int>(r);
}

Vector local_average(const Grid& grid, const MeasurementBox& box)
{
  const int n = grid.n_per_side();
  const int i0 = to_node_index(box.x0, grid, "corner");
  const int j0 = to_node_index(box.y0, grid, "corner");
  const int p = to_node_index(box.width, grid, "width");
  if (p < 1 || i0 < 0 || j0 < 0 || i0 + p > n || j0 + p > n)
    throw std::invalid_argument("measurement box must lie in the unit square");

  const Rect r{box.x0, box.x0 + box.width, box.y0, box.y0 + box.width};
  const double inv_area = 1.0 / (box.width * box.width);
  Vector l = Vector::Zero(grid.n_dof());
  for (const Triangle& t : grid.elements())
  {
    if (!r.contains(t.cx, t.cy))
      continue;
    for (int a = 0; a < 3; ++a)
      if (t.dofs[a] >= 0)
        l[t.dofs[a]] += inv_area * t.area / 3.0;
  }
  return l;
}

} // namespace

std::string to_string(Placement p)
{
  switch (p)
  {
  case Placement::random:
    return "random";
  case Placement::evenly_spaced:
    return "evenly_spaced";
  case Placement::given:
    return "given";
  }
  return "unknown";
}

Placement placement_from_string(std::string_view name)
{
  for (Placement p :
       {Placement::random, Placement::evenly_spaced, Placement::given})
    if (to_string(p) == name)
      return p;
  throw std::invalid_argument("unknown placement '" + std::string(name) + "'");
}

MeasurementSpace::MeasurementSpace(std::shared_ptr<const DiscreteSpace> space,
                                   MeasurementLayout layout)
    : space_(std::move(space)), layout_(std::move(layout))
{
  const Grid& grid = space_->grid();
  const int m = static_cast<int>(layout_.boxes.size());
  if (m > grid.n_dof())
    throw std::invalid_argument("more measurements than degrees of freedom");

  const Eigen::Index n = grid.n_dof();
  ell_.resize(n, m);
  for (int i = 0; i < m; ++i)
    ell_.col(i) = local_average(grid, layout_.boxes[i]);
  omega_ = space_->stiffness_solver().solve(ell_);

  psi_.resize(n, m);
  K_psi_.resize(n, m);
  M_ = Matrix::Zero(m, m);
  if (m > 0)
  {
    const Matrix gram = omega_.transpose() * ell_;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gram + gram.transpose()),
                                              Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxGramCondition)
    {
      std::ostringstream msg;
      msg << "measurement functionals are (numerically) linearly dependent: "
             "Gram condition "
          << (lo > 0.0 ? hi / lo : INFINITY) << " exceeds 1e12";
      throw std::invalid_argument(msg.str());
    }
  }

  // Modified Gram-Schmidt in the V-inner product, two passes.
  const SparseMatrix& K = space_->stiffness();
  for (int j = 0; j < m; ++j)
  {
    Vector v = omega_.col(j);
    Vector t = Vector::Unit(m, j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < j; ++i)
      {
        const double r = K_psi_.col(i).dot(v);
        v -= r * psi_.col(i);
        t -= r * M_.row(i).transpose();
      }
    const double nv = std::sqrt(v.dot(K * v));
    psi_.col(j) = v / nv;
    M_.row(j) = (t / nv).transpose();
    K_psi_.col(j) = K * psi_.col(j);
  }
  M_norm_ = m > 0 ? Eigen::JacobiSVD<Matrix>(M_).singularValues()(0) : 0.0;
}

Vector MeasurementSpace::measure(const StateVector& u) const
{
  return ell_.transpose() * u;
}

MeasurementSpace build_measurements(std::shared_ptr<const DiscreteSpace> space,
                                    Placement placement, int m,
                                    double box_width, std::uint64_t seed)
{
  if (m < 0)
    throw std::invalid_argument("m must be nonnegative");
  const Grid& grid = space->grid();
  if (m > grid.n_dof())
    throw std::invalid_argument("more measurements than degrees of freedom");
  const int n = grid.n_per_side();
  const int p = to_node_index(box_width, grid, "width");
  if (p < 1 || p > n)
    throw std::invalid_argument("measurement box width out of range");

  MeasurementLayout layout;
  layout.placement = placement;
  layout.seed = seed;
  layout.box_width = box_width;
  const double h = grid.h();

  switch (placement)
  {
  case Placement::random:
  {
    // Corners on mesh nodes, uniform over all fully contained placements.
    // Overlaps are fine; an exact repeat would duplicate a functional and is
    // redrawn.
    Rng rng(seed);
    const std::uint64_t slots = std::uint64_t(n - p + 1) * (n - p + 1);
    if (std::uint64_t(m) > slots)
      throw std::invalid_argument("not enough distinct box positions");
    while (static_cast<int>(layout.boxes.size()) < m)
    {
      const int a = static_cast<int>(rng.below(n - p + 1));
      const int b = static_cast<int>(rng.below(n - p + 1));
      const MeasurementBox box{a * h, b * h, box_width};
      bool repeat = false;
      for (const auto& o : layout.boxes)
        repeat = repeat || (o.x0 == box.x0 && o.y0 == box.y0);
      if (!repeat)
        layout.boxes.push_back(box);
    }
    break;
  }
  case Placement::evenly_spaced:
  {
    const int k = static_cast<int>(std::lround(std::sqrt(double(m))));
    if (k * k != m)
      throw std::invalid_argument("evenly spaced placement needs m = k^2");
    for (int b = 0; b < k; ++b)
      for (int a = 0; a < k; ++a)
        layout.boxes.push_back({(a + 0.5) / k - 0.5 * box_width,
                                (b + 0.5) / k - 0.5 * box_width, box_width});
    break;
  }
  case Placement::given:
    throw std::invalid_argument("use the layout overload for given boxes");
  }
  return MeasurementSpace(std::move(space), std::move(layout));
}

MeasurementSpace build_measurements(std::shared_ptr<const DiscreteSpace> space,
                                    const MeasurementLayout& layout)
{
  return MeasurementSpace(std::move(space), layout);
}

Observation project_W(const MeasurementSpace& W, const StateVector& u)
{
  Observation obs;
  obs.w = W.K_psi().transpose() * u;
  return obs;
}

Observation observe_raw(const MeasurementSpace& W, const Vector& z)
{
  if (z.size() != W.m())
    throw std::invalid_argument("observation length != m");
  Observation obs;
  obs.w = W.transform() * z;
  obs.z = z;
  return obs;
}

Observation observe_noisy(const MeasurementSpace& W, const StateVector& u,
                          double noise_level, std::uint64_t seed)
{
  if (noise_level < 0.0)
    throw std::invalid_argument("noise level must be nonnegative");
  Rng rng(seed);
  Vector eta(W.m());
  for (int i = 0; i < W.m(); ++i)
    eta[i] = rng.uniform(-noise_level, noise_level);
  Observation obs = observe_raw(W, W.measure(u) + eta);
  obs.eps_noise = W.transform_norm() * eta.norm();
  obs.noise = std::move(eta);
  return obs;
}

} // namespace nlrm
