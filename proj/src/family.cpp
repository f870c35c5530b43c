/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/family.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>

namespace nlrm
{

DimensionCriterion FamilyMode::criterion() const
{
  return kind == sigma ? DimensionCriterion::product()
                       : DimensionCriterion::targets(eps, mu);
}

bool FamilyMode::passes(double tau) const
{
  return kind == sigma ? tau <= sigma_target : tau <= 1.0;
}

std::string to_string(SplitRule r)
{
  return r == SplitRule::tau_probe ? "tau_probe" : "cyclic_mix";
}

SplitRule split_rule_from_string(std::string_view name)
{
  if (name == "tau_probe")
    return SplitRule::tau_probe;
  if (name == "cyclic_mix")
    return SplitRule::cyclic_mix;
  throw std::invalid_argument("unknown split rule: " + std::string(name));
}

ReducedFamily::ReducedFamily(ParameterBox root, FamilyMode mode)
    : root_(std::move(root)), mode_(mode)
{
}

int ReducedFamily::add_cell(Cell c)
{
  c.id = static_cast<int>(pool_.size());
  pool_.push_back(std::move(c));
  return pool_.back().id;
}

std::vector<int> ReducedFamily::cells_at(int K) const
{
  if (pool_.empty())
    throw std::logic_error("family has no cells");
  if (K < 1 || K > size())
    throw std::out_of_range("cells_at: K out of range");
  std::vector<int> leaves{0};
  for (int s = 0; s < K - 1; ++s)
  {
    const SplitRecord& r = splits_[s];
    std::erase(leaves, r.cell);
    leaves.push_back(r.lower);
    leaves.push_back(r.upper);
  }
  std::sort(leaves.begin(), leaves.end());
  return leaves;
}

double ReducedFamily::sigma_at(int K) const
{
  double s = 0.0;
  for (int id : cells_at(K))
    s = std::max(s, pool_[id].sigma());
  return s;
}

int ReducedFamily::locate(const Vector& y, int K) const
{
  for (int id : cells_at(K))
    if (pool_[id].box.owns(y, root_))
      return id;
  throw std::out_of_range("locate: parameter outside the family's box");
}

std::vector<int> owned_samples(const SnapshotSet& training,
                               const ParameterBox& box,
                               const ParameterBox& root)
{
  std::vector<int> idx;
  for (std::size_t i = 0; i < training.size(); ++i)
    if (box.owns(training.parameters[i], root))
      idx.push_back(static_cast<int>(i));
  return idx;
}

Cell build_cell(const AffineModel& model, const SnapshotSet& training,
                const MeasurementSpace& W, const ParameterBox& box, int level,
                const FamilyOptions& options)
{
  Cell c;
  c.level = level;
  c.box = box;
  c.training = owned_samples(training, box, model.box());
  c.data_starved = static_cast<int>(c.training.size()) < options.min_samples;

  const StateVector offset = solve_state(model, box.center());
  Matrix snaps;
  if (c.training.empty())
    snaps = offset;
  else
  {
    snaps.resize(offset.size(), static_cast<Eigen::Index>(c.training.size()));
    for (std::size_t i = 0; i < c.training.size(); ++i)
      snaps.col(static_cast<Eigen::Index>(i)) =
          training.states.col(c.training[i]);
  }
  c.hierarchy = greedy_hierarchy(model.space(), snaps, offset, W.m());
  attach_stability(c.hierarchy, W);
  const DimensionChoice choice =
      best_dimension(c.hierarchy, options.mode.criterion(), options.n_min);
  c.space = c.hierarchy.space(choice.n);
  c.tau = choice.tau;
  return c;
}

namespace
{

struct Probe
{
  int direction = 0;
  std::optional<std::array<Cell, 2>> children;
};

std::array<Cell, 2> make_children(const Cell& cell, int i,
                                  const AffineModel& model,
                                  const SnapshotSet& training,
                                  const MeasurementSpace& W,
                                  const FamilyOptions& options)
{
  auto [lo, hi] = cell.box.split(i);
  return {build_cell(model, training, W, lo, cell.level + 1, options),
          build_cell(model, training, W, hi, cell.level + 1, options)};
}

Probe probe(const Cell& cell, const AffineModel& model,
            const SnapshotSet& training, const MeasurementSpace& W,
            const FamilyOptions& options)
{
  const int d = cell.box.dim();
  if (options.rule == SplitRule::cyclic_mix && cell.level % 2 == 0)
    return {(cell.level / 2) % d, std::nullopt};
  if (d == 1)
    return {0, std::nullopt};

  std::vector<std::optional<std::array<Cell, 2>>> trial(d);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < d; ++i)
  {
    try
    {
      trial[i] = make_children(cell, i, model, training, W, options);
    }
    catch (...)
    {
#pragma omp critical(nlrm_probe_error)
      if (!error)
        error = std::current_exception();
    }
  }
  if (error)
    std::rethrow_exception(error);

  int best = 0;
  double best_tau = kInfiniteMu;
  for (int i = 0; i < d; ++i)
  {
    const double t = std::max((*trial[i])[0].tau, (*trial[i])[1].tau);
    if (i == 0 || t < best_tau)
    {
      best = i;
      best_tau = t;
    }
  }
  return {best, std::move(trial[best])};
}

} // namespace

int split_direction(const Cell& cell, const AffineModel& model,
                    const SnapshotSet& training, const MeasurementSpace& W,
                    const FamilyOptions& options)
{
  return probe(cell, model, training, W, options).direction;
}

ReducedFamily build_family(const AffineModel& model,
                           const SnapshotSet& training,
                           const MeasurementSpace& W,
                           const FamilyOptions& options)
{
  if (training.size() == 0)
    throw std::invalid_argument("build_family: empty training set");
  if (options.K_max < 1)
    throw std::invalid_argument("build_family: K_max < 1");

  ReducedFamily fam(model.box(), options.mode);
  fam.add_cell(build_cell(model, training, W, model.box(), 0, options));
  std::vector<int> leaves{0};

  for (;;)
  {
    int k_split = -1;
    for (int id : leaves)
    {
      const Cell& c = fam.cell(id);
      if (options.mode.passes(c.tau))
        continue;
      if (k_split < 0 || c.sigma() > fam.cell(k_split).sigma())
        k_split = id;
    }
    if (k_split < 0)
    {
      fam.set_converged(true);
      break;
    }
    if (static_cast<int>(leaves.size()) >= options.K_max)
      break;

    const Cell& parent = fam.cell(k_split);
    Probe p = probe(parent, model, training, W, options);
    std::array<Cell, 2> kids =
        p.children ? std::move(*p.children)
                   : make_children(parent, p.direction, model, training, W,
                                   options);
    for (Cell& k : kids)
      k.parent = k_split;
    const int lo = fam.add_cell(std::move(kids[0]));
    const int hi = fam.add_cell(std::move(kids[1]));
    std::erase(leaves, k_split);
    leaves.push_back(lo);
    leaves.push_back(hi);

    double s = 0.0;
    for (int id : leaves)
      s = std::max(s, fam.cell(id).sigma());
    fam.add_split({k_split, p.direction, lo, hi, s});
  }
  return fam;
}

} // namespace nlrm
