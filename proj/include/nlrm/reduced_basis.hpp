/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_REDUCED_BASIS_HPP
#define NLRM_REDUCED_BASIS_HPP

#include <limits>
#include <string>
#include <vector>

#include "nlrm/fem.hpp"
#include "nlrm/measurement.hpp"

namespace nlrm
{

inline constexpr double kInfiniteMu = std::numeric_limits<double>::infinity();

/// V_n = offset + span(basis), basis V-orthonormal. eps is the largest
/// training-set distance to V_n (an empirical bound, not a certificate) and
/// mu = mu(span(basis), W).
struct AffineReducedSpace
{
  StateVector offset;
  Matrix basis;
  double eps = 0.0;
  double mu = 1.0;
  std::vector<int> picks; // snapshot indices chosen by the greedy

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Nested greedy spaces offset + span(basis.leftCols(n)), n = 0..depth.
struct RBHierarchy
{
  StateVector offset;
  Matrix basis;
  std::vector<double> eps; // eps[n], n = 0..depth
  std::vector<double> mu;  // mu[n], filled by attach_stability
  std::vector<int> picks;

  int depth() const { return static_cast<int>(basis.cols()); }
  AffineReducedSpace space(int n) const;
};

/// Greedy reduced basis on snapshots - offset. Step n picks the snapshot
/// furthest (in V) from the current space, lowest index on ties, and stops
/// early once every residual is below 1e-12.
RBHierarchy greedy_hierarchy(const DiscreteSpace& space,
                             const Matrix& snapshots,
                             const StateVector& offset, int m_max);

/// 1 / sigma_min of the cross-Gramian <phi_i, psi_j>_V. Returns 1 for an
/// empty basis and kInfiniteMu when sigma_min < 1e-14.
double stability_mu(const Matrix& basis, const MeasurementSpace& W);

/// Fills h.mu[n] for n = 0..depth.
void attach_stability(RBHierarchy& h, const MeasurementSpace& W);

double dist_to_space(const DiscreteSpace& space, const AffineReducedSpace& rs,
                     const StateVector& u);

struct DimensionCriterion
{
  enum Kind
  {
    sigma,
    eps_mu
  } kind = sigma;
  double eps = 1.0; // targets for eps_mu
  double mu = 1.0;

  static DimensionCriterion product() { return {}; }
  static DimensionCriterion targets(double eps, double mu)
  {
    return {eps_mu, eps, mu};
  }
};

struct DimensionChoice
{
  int n = 0;
  double tau = 0.0;
};

/// argmin over n in [n_min, depth] of mu_n eps_n (sigma) or
/// max(mu_n/mu, eps_n/eps) (eps_mu); smaller n wins ties. Infinite mu is
/// never selected.
DimensionChoice best_dimension(const RBHierarchy& h,
                               const DimensionCriterion& criterion,
                               int n_min = 0);

} // namespace nlrm

#endif
