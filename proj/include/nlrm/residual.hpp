/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_RESIDUAL_HPP
#define NLRM_RESIDUAL_HPP

#include <optional>

#include "nlrm/parametric_model.hpp"

namespace nlrm
{

/**
 * R(v,y) = || e_0 + sum_j y_j e_j ||_V^2 = y^T Q y + 2 b^T y + c, with the
 * Riesz lifts e_j = K^{-1}(A_j v - f_j) of the affine residual pieces.
 */
struct ResidualQuadratic
{
  Matrix Q;
  Vector b;
  double c = 0.0;
  Matrix lifts; // e_0..e_d
  Matrix duals; // A_j v - f_j, so duals = K * lifts

  int dim() const { return static_cast<int>(b.size()); }

  /// ||e(y)||_V^2 evaluated from the lifted vectors (no cancellation in the
  /// expanded quadratic).
  double direct_value(const Vector& y) const;
};

ResidualQuadratic build_quadratic(const AffineModel& model,
                                  const StateVector& v);

/// y^T Q y + 2 b^T y + c
double eval_residual(const ResidualQuadratic& q, const Vector& y);

/// 2 (Q y + b)
Vector residual_gradient(const ResidualQuadratic& q, const Vector& y);

struct BoxQpResult
{
  Vector y;
  double value = 0.0;      // R(v, y) at the returned point
  double optimality = 0.0; // ||y - clip(y - grad/L)||_inf
  long iterations = 0;     // coordinate updates
  bool certified = false;  // optimality <= tol reached before the cap
};

/// Cyclic coordinate descent with exact clipped 1-D steps, started at the
/// cell center (or `start`). Stops when the projected-gradient measure is
/// below tol or after 10000*d coordinate updates.
BoxQpResult minimize_box(const ResidualQuadratic& q, const ParameterBox& cell,
                         double tol = 1e-10,
                         const std::optional<Vector>& start = std::nullopt);

struct SurrogateValue
{
  double S = 0.0; // unsquared residual at the minimizer
  Vector y;
  bool certified = false;
};

SurrogateValue surrogate(const ResidualQuadratic& q, const ParameterBox& cell,
                         double tol = 1e-10);

/// min_{y in cell} ||A(y)v - f(y)||_{V'}, the distance surrogate for the
/// manifold portion over `cell`.
double surrogate_S(const AffineModel& model, const StateVector& v,
                   const ParameterBox& cell);

} // namespace nlrm

#endif
