/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_ALTMIN_HPP
#define NLRM_ALTMIN_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlrm/estimation.hpp"
#include "nlrm/measurement.hpp"
#include "nlrm/residual.hpp"

namespace nlrm
{

/// argmin_{y in Y} R(u, y); warm-started from `start` when given. The
/// returned value is evaluated from the residual vectors, not the expanded
/// quadratic.
BoxQpResult y_step(const AffineModel& model, const StateVector& u,
                   const std::optional<Vector>& start = std::nullopt);

struct VStepResult
{
  StateVector v;
  Matrix SW;       // S psi_i, i = 1..m
  long solves = 0; // SPD solves spent, m + 3
};

/**
 * argmin R(v, y) over v in w + W^perp (w given by its psi-coordinates), for
 * a symmetric A(y):
 *   K Tw = A(y) w,  K g = f(y),  A(y) S psi_i = K psi_i,
 *   z* = g - P_{S(W)}(g - Tw),  A(y) v* = K z*.
 * Throws SolverError when the Z-Gram of S(W) has condition number > 1e12.
 */
VStepResult v_step(const AffineModel& model, const MeasurementSpace& W,
                   const Vector& w, const Vector& y);

/// S v: the solution of A(y) (S v) = K v.
StateVector apply_S(const AffineModel& model, const Vector& y,
                    const StateVector& v);
/// T v = K^{-1} A(y) v.
StateVector apply_T(const AffineModel& model, const Vector& y,
                    const StateVector& v);

struct AltMinOptions
{
  int max_iters = 50;
  double tol = 1e-10;
};

struct AltMinStep
{
  double residual = 0.0; // sqrt R(u^k, y^k)
  double y_seconds = 0.0;
  double v_seconds = 0.0;
};

struct AltMinState
{
  StateVector u;
  Vector y;
  std::vector<double> history; // history[0] is the initial (u^0, y^0)
  std::vector<AltMinStep> steps;
  Matrix SW; // S(W) basis at the last v-step
  int iterations = 0;
  std::string stop_reason; // "converged", "max_iters" or "error: ..."
};

AltMinState run_altmin(const AffineModel& model, const MeasurementSpace& W,
                       const Observation& obs, const StateVector& u0,
                       const AltMinOptions& options = {},
                       const std::optional<Vector>& y0 = std::nullopt);

/// Initialized from the selected estimate (u*, y*).
AltMinState run_altmin(const AffineModel& model, const MeasurementSpace& W,
                       const Observation& obs, const SelectionResult& init,
                       const AltMinOptions& options = {});

} // namespace nlrm

#endif
