/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_ESTIMATION_HPP
#define NLRM_ESTIMATION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlrm/family.hpp"
#include "nlrm/pbdw.hpp"
#include "nlrm/residual.hpp"

namespace nlrm
{

/// One local estimator: a reduced space together with the model and the
/// parameter region its surrogate is minimized over.
struct Candidate
{
  const AffineModel* model = nullptr;
  AffineReducedSpace space;
  ParameterBox box;
};

/// Candidates of the family's final cells (cells_at(K) if K > 0). With
/// global_box the surrogate of every cell is minimized over the whole root
/// box instead of the cell.
std::vector<Candidate> family_candidates(const ReducedFamily& family,
                                         const AffineModel& model, int K = 0,
                                         bool global_box = false);

struct CellEstimate
{
  int k = 0;
  bool ok = false;
  std::string failure; // reason when !ok
  StateVector u_star;
  double S = kInfiniteMu;
  Vector y;               // surrogate minimizer
  bool certified = false; // QP reached its tolerance
  double bound = 0.0;     // mu_k eps_k
};

CellEstimate estimate_cell(const Candidate& cand, const MeasurementSpace& W,
                           const Observation& obs);

struct SelectionResult
{
  std::vector<CellEstimate> cells;
  int k_star = -1;
  StateVector u_star;
  Vector y_star;
  std::vector<int> plausible; // filled by plausible_set
};

/// u*_k and S_k for every candidate, k* = argmin S_k (ties to the smallest
/// k). Candidates whose reconstruction fails are skipped; throws if none
/// succeeds.
SelectionResult select_state(std::span<const Candidate> candidates,
                             const MeasurementSpace& W,
                             const Observation& obs);

SelectionResult select_state(const ReducedFamily& family,
                             const AffineModel& model,
                             const MeasurementSpace& W, const Observation& obs,
                             bool global_box = false);

/// argmin_k ||truth - u*_k|| over the successful cells (test harness only).
int oracle_select(const SelectionResult& sel, const DiscreteSpace& space,
                  const StateVector& truth);

int oracle_select(std::span<const Candidate> candidates,
                  const MeasurementSpace& W, const Observation& obs,
                  const StateVector& truth);

/// {k : S_k <= R mu_k eps_k}; stored into sel.plausible and returned.
std::vector<int> plausible_set(SelectionResult& sel, double R);

struct ParameterEstimate
{
  Vector y;
  double residual = 0.0; // unsquared
  bool certified = false;
  /// r^-1 * residual, an upper bound for ||u* - u(y*)|| (needs a field).
  std::optional<double> state_bound;
  /// ||u* - u(y*)||, one extra solve (diagnostics only).
  std::optional<double> state_distance;
};

ParameterEstimate estimate_parameter(const AffineModel& model,
                                     const StateVector& u_star,
                                     const ParameterBox& region,
                                     bool diagnostics = false);

/// ||a(y1) - a(y2)||_{L2(D)} for models built from a coefficient field.
double coefficient_l2_distance(const AffineModel& model, const Vector& y1,
                               const Vector& y2);

} // namespace nlrm

#endif
