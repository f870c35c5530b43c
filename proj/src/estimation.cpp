/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace nlrm
{

std::vector<Candidate> family_candidates(const ReducedFamily& family,
                                         const AffineModel& model, int K,
                                         bool global_box)
{
  std::vector<Candidate> out;
  for (int id : family.cells_at(K > 0 ? K : family.size()))
  {
    const Cell& c = family.cell(id);
    out.push_back({&model, c.space, global_box ? family.root() : c.box});
  }
  return out;
}

CellEstimate estimate_cell(const Candidate& cand, const MeasurementSpace& W,
                           const Observation& obs)
{
  CellEstimate e;
  e.bound = cand.space.mu * cand.space.eps;
  try
  {
    e.u_star = reconstruct(cand.space, W, obs).u_star;
    const SurrogateValue s =
        surrogate(build_quadratic(*cand.model, e.u_star), cand.box);
    e.S = s.S;
    e.y = s.y;
    e.certified = s.certified;
    e.ok = true;
  }
  catch (const StabilityError& err)
  {
    e.failure = err.what();
  }
  catch (const SolverError& err)
  {
    e.failure = err.what();
  }
  return e;
}

SelectionResult select_state(std::span<const Candidate> candidates,
                             const MeasurementSpace& W, const Observation& obs)
{
  SelectionResult sel;
  const int K = static_cast<int>(candidates.size());
  sel.cells.resize(K);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < K; ++k)
  {
    sel.cells[k] = estimate_cell(candidates[k], W, obs);
    sel.cells[k].k = k;
  }
  for (const CellEstimate& e : sel.cells)
    if (e.ok && (sel.k_star < 0 || e.S < sel.cells[sel.k_star].S))
      sel.k_star = e.k;
  if (sel.k_star < 0)
    throw std::runtime_error("select_state: every local reconstruction failed");
  sel.u_star = sel.cells[sel.k_star].u_star;
  sel.y_star = sel.cells[sel.k_star].y;
  return sel;
}

SelectionResult select_state(const ReducedFamily& family,
                             const AffineModel& model,
                             const MeasurementSpace& W, const Observation& obs,
                             bool global_box)
{
  const auto cands = family_candidates(family, model, 0, global_box);
  return select_state(cands, W, obs);
}

int oracle_select(const SelectionResult& sel, const DiscreteSpace& space,
                  const StateVector& truth)
{
  int best = -1;
  double best_err = 0.0;
  for (const CellEstimate& e : sel.cells)
  {
    if (!e.ok)
      continue;
    const double err = space.norm(truth - e.u_star);
    if (best < 0 || err < best_err)
    {
      best = e.k;
      best_err = err;
    }
  }
  if (best < 0)
    throw std::runtime_error("oracle_select: no successful reconstruction");
  return best;
}

int oracle_select(std::span<const Candidate> candidates,
                  const MeasurementSpace& W, const Observation& obs,
                  const StateVector& truth)
{
  int best = -1;
  double best_err = 0.0;
  for (std::size_t k = 0; k < candidates.size(); ++k)
  {
    try
    {
      const StateVector u = reconstruct(candidates[k].space, W, obs).u_star;
      const double err = W.space().norm(truth - u);
      if (best < 0 || err < best_err)
      {
        best = static_cast<int>(k);
        best_err = err;
      }
    }
    catch (const StabilityError&)
    {
    }
  }
  if (best < 0)
    throw std::runtime_error("oracle_select: no successful reconstruction");
  return best;
}

std::vector<int> plausible_set(SelectionResult& sel, double R)
{
  sel.plausible.clear();
  for (const CellEstimate& e : sel.cells)
    if (e.ok && e.S <= R * e.bound)
      sel.plausible.push_back(e.k);
  return sel.plausible;
}

ParameterEstimate estimate_parameter(const AffineModel& model,
                                     const StateVector& u_star,
                                     const ParameterBox& region,
                                     bool diagnostics)
{
  const SurrogateValue s = surrogate(build_quadratic(model, u_star), region);
  ParameterEstimate out{s.y, s.S, s.certified, std::nullopt, std::nullopt};
  if (model.field())
    out.state_bound = s.S / ellipticity_bounds(model).r;
  if (diagnostics)
    out.state_distance =
        model.space().norm(u_star - solve_state(model, model.box().clip(s.y)));
  return out;
}

double coefficient_l2_distance(const AffineModel& model, const Vector& y1,
                               const Vector& y2)
{
  const std::vector<double> a1 = model.diffusivity(y1);
  const std::vector<double> a2 = model.diffusivity(y2);
  const auto& elems = model.space().grid().elements();
  double acc = 0.0;
  for (std::size_t e = 0; e < elems.size(); ++e)
    acc += elems[e].area * (a1[e] - a2[e]) * (a1[e] - a2[e]);
  return std::sqrt(acc);
}

} // namespace nlrm
