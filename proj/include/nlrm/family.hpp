/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_FAMILY_HPP
#define NLRM_FAMILY_HPP

#include <string>
#include <string_view>
#include <vector>

#include "nlrm/measurement.hpp"
#include "nlrm/parametric_model.hpp"
#include "nlrm/reduced_basis.hpp"

namespace nlrm
{

/// Admissibility target. sigma: every cell needs mu_k eps_k <= sigma.
/// eps_mu: every cell needs eps_k <= eps and mu_k <= mu.
struct FamilyMode
{
  enum Kind
  {
    sigma,
    eps_mu
  } kind = sigma;
  double sigma_target = 0.0;
  double eps = 1.0;
  double mu = 1.0;

  static FamilyMode make_sigma(double s) { return {sigma, s, 1.0, 1.0}; }
  static FamilyMode make_eps_mu(double e, double m)
  {
    return {eps_mu, 0.0, e, m};
  }

  DimensionCriterion criterion() const;
  /// tau already computed with criterion(): passes the mode's test?
  bool passes(double tau) const;
};

enum class SplitRule
{
  tau_probe,
  cyclic_mix,
};

std::string to_string(SplitRule r);
SplitRule split_rule_from_string(std::string_view name);

struct FamilyOptions
{
  FamilyMode mode;
  int K_max = 64;
  SplitRule rule = SplitRule::tau_probe;
  int min_samples = 5; // fewer owned training samples -> data_starved
  int n_min = 0;
};

struct Cell
{
  int id = 0;
  int parent = -1;
  int level = 0;
  ParameterBox box;
  std::vector<int> training; // indices into the training set owned by box
  RBHierarchy hierarchy;     // offset u(center of box)
  AffineReducedSpace space;  // hierarchy.space(n) at the chosen n
  double tau = 0.0;
  bool data_starved = false;

  double sigma() const { return space.mu * space.eps; }
};

struct SplitRecord
{
  int cell = 0;      // id of the split cell
  int direction = 0; // coordinate index
  int lower = 0;     // child ids
  int upper = 0;
  double sigma_after = 0.0; // sigma_K after this split
};

/**
 * Every cell ever created (the split tree) plus the split log. The family
 * after s splits is obtained by replaying the first s records; K = s + 1.
 */
class ReducedFamily
{
public:
  ReducedFamily(ParameterBox root, FamilyMode mode);

  const ParameterBox& root() const { return root_; }
  const FamilyMode& mode() const { return mode_; }
  const std::vector<Cell>& pool() const { return pool_; }
  const Cell& cell(int id) const { return pool_.at(id); }
  const std::vector<SplitRecord>& splits() const { return splits_; }

  /// Number of cells of the final family.
  int size() const { return static_cast<int>(splits_.size()) + 1; }
  bool converged() const { return converged_; }

  /// Leaf ids of the family with K cells (1 <= K <= size()), increasing id.
  std::vector<int> cells_at(int K) const;
  std::vector<int> leaves() const { return cells_at(size()); }

  /// max_k mu_k eps_k over cells_at(K).
  double sigma_at(int K) const;
  double sigma() const { return sigma_at(size()); }

  /// Leaf of the K-cell family owning y.
  int locate(const Vector& y, int K) const;
  int locate(const Vector& y) const { return locate(y, size()); }

  // Construction interface (used by build_family and deserialization).
  int add_cell(Cell c);
  void add_split(SplitRecord r) { splits_.push_back(r); }
  void set_converged(bool c) { converged_ = c; }

private:
  ParameterBox root_;
  FamilyMode mode_;
  std::vector<Cell> pool_;
  std::vector<SplitRecord> splits_;
  bool converged_ = false;
};

/// Training samples of `training` owned by `box` (half-open, see
/// ParameterBox::owns).
std::vector<int> owned_samples(const SnapshotSet& training,
                               const ParameterBox& box,
                               const ParameterBox& root);

/// Builds one cell: offset u(center), greedy hierarchy on the owned samples
/// (or on the offset alone when there are none), stability, best dimension.
Cell build_cell(const AffineModel& model, const SnapshotSet& training,
                const MeasurementSpace& W, const ParameterBox& box, int level,
                const FamilyOptions& options);

/// Direction for splitting `cell`. tau_probe: argmin_i max(tau(lower_i),
/// tau(upper_i)), ties to the smallest i. cyclic_mix: (level/2) mod d on even
/// levels, tau_probe otherwise.
int split_direction(const Cell& cell, const AffineModel& model,
                    const SnapshotSet& training, const MeasurementSpace& W,
                    const FamilyOptions& options);

/// Repeatedly splits the cell with the largest mu_k eps_k until every cell
/// passes the mode's test (converged) or K_max cells exist.
ReducedFamily build_family(const AffineModel& model,
                           const SnapshotSet& training,
                           const MeasurementSpace& W,
                           const FamilyOptions& options);

} // namespace nlrm

#endif
