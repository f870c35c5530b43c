/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_PBDW_HPP
#define NLRM_PBDW_HPP

#include <stdexcept>

#include "nlrm/measurement.hpp"
#include "nlrm/reduced_basis.hpp"

namespace nlrm
{

/// The cross-Gramian of the reduced space and W is (numerically) rank
/// deficient; the caller should fall back to a smaller reduced dimension.
class StabilityError : public std::runtime_error
{
public:
  StabilityError(const std::string& what, double mu)
      : std::runtime_error(what), mu(mu)
  {
  }
  double mu;
};

struct Reconstruction
{
  StateVector u_star; // data-consistent estimate, P_W u* = w
  StateVector v_star; // its component in the reduced space
  Vector coeffs;      // v* = offset + basis * coeffs
};

/**
 * One-space (PBDW) estimator u* = argmin { ||v - P_{V_n} v|| : P_W v = w }
 * for an affine reduced space. Computed as v* = argmin_{v in V_n}
 * ||w - P_W v|| through the m x n least-squares problem on the cross-Gramian,
 * then u* = v* + (w - P_W v*).
 */
Reconstruction reconstruct(const AffineReducedSpace& rs,
                           const MeasurementSpace& W, const Observation& obs);

} // namespace nlrm

#endif
