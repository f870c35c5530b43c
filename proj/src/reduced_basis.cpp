/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/reduced_basis.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "nlrm/kernels.hpp"

namespace nlrm
{

namespace
{

constexpr double kExhausted = 1e-12;
constexpr double kSingular = 1e-14;

} // namespace

AffineReducedSpace RBHierarchy::space(int n) const
{
  if (n < 0 || n > depth())
    throw std::out_of_range("hierarchy level out of range");
  AffineReducedSpace rs;
  rs.offset = offset;
  rs.basis = basis.leftCols(n);
  rs.eps = eps[n];
  rs.mu = n < static_cast<int>(mu.size()) ? mu[n] : kInfiniteMu;
  rs.picks.assign(picks.begin(), picks.begin() + n);
  return rs;
}

RBHierarchy greedy_hierarchy(const DiscreteSpace& space,
                             const Matrix& snapshots,
                             const StateVector& offset, int m_max)
{
  if (snapshots.cols() == 0)
    throw std::invalid_argument("greedy_hierarchy: empty snapshot set");
  if (m_max < 0)
    throw std::invalid_argument("greedy_hierarchy: m_max < 0");

  const SparseMatrix& K = space.stiffness();
  RBHierarchy h;
  h.offset = offset;
  h.basis.resize(space.n_dof(), 0);

  Matrix R = snapshots.colwise() - offset;
  Vector norms = kernels::column_norms(K, R);

  for (;;)
  {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < norms.size(); ++i)
      if (norms[i] > norms[best])
        best = i;
    h.eps.push_back(norms[best]);
    if (h.depth() >= m_max || norms[best] < kExhausted)
      break;

    Vector phi = R.col(best);
    for (int i = 0; i < h.depth(); ++i)
      phi -= h.basis.col(i).dot(K * phi) * h.basis.col(i);
    const double nphi = std::sqrt(phi.dot(K * phi));
    if (nphi < kExhausted)
      break;
    phi /= nphi;

    h.basis.conservativeResize(Eigen::NoChange, h.depth() + 1);
    h.basis.col(h.depth() - 1) = phi;
    h.picks.push_back(static_cast<int>(best));
    kernels::deflate_columns(K, phi, R, norms);
  }
  return h;
}

double stability_mu(const Matrix& basis, const MeasurementSpace& W)
{
  if (basis.cols() == 0)
    return 1.0;
  if (basis.cols() > W.m())
    throw std::invalid_argument("stability_mu: dim(V_n) > dim(W)");
  const Matrix G = basis.transpose() * W.K_psi();
  Eigen::JacobiSVD<Matrix> svd(G);
  const double smin = svd.singularValues()(basis.cols() - 1);
  if (smin < kSingular)
    return kInfiniteMu;
  return 1.0 / smin;
}

void attach_stability(RBHierarchy& h, const MeasurementSpace& W)
{
  h.mu.assign(h.depth() + 1, kInfiniteMu);
  for (int n = 0; n <= h.depth() && n <= W.m(); ++n)
    h.mu[n] = stability_mu(h.basis.leftCols(n), W);
}

double dist_to_space(const DiscreteSpace& space, const AffineReducedSpace& rs,
                     const StateVector& u)
{
  Vector r = u - rs.offset;
  if (rs.dim() > 0)
  {
    const Vector coef = rs.basis.transpose() * (space.stiffness() * r);
    r -= rs.basis * coef;
  }
  return space.norm(r);
}

DimensionChoice best_dimension(const RBHierarchy& h,
                               const DimensionCriterion& criterion, int n_min)
{
  DimensionChoice best{-1, kInfiniteMu};
  for (int n = std::max(0, n_min); n <= h.depth(); ++n)
  {
    const double mu = n < static_cast<int>(h.mu.size()) ? h.mu[n] : kInfiniteMu;
    if (!std::isfinite(mu))
      continue;
    const double eps = h.eps[n];
    const double tau = criterion.kind == DimensionCriterion::sigma
                           ? mu * eps
                           : std::max(mu / criterion.mu, eps / criterion.eps);
    if (best.n < 0 || tau < best.tau)
      best = {n, tau};
  }
  if (best.n < 0)
    best = {std::max(0, n_min), kInfiniteMu};
  return best;
}

} // namespace nlrm
