/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include "nlrm/estimation.hpp"
#include "support.hpp"

namespace nlrm
{
namespace
{

struct Bed
{
  std::shared_ptr<const DiscreteSpace> space = testing::make_space(8);
  AffineModel model = testing::grid_model(space);
  MeasurementSpace W =
      testing::random_sensors(space, 9, 19);
  SnapshotSet train = sample_snapshots(model, 150, 5);

  ReducedFamily family(int K_max) const
  {
    FamilyOptions opt;
    opt.mode = FamilyMode::make_sigma(0.0);
    opt.K_max = K_max;
    return build_family(model, train, W, opt);
  }
};

TEST(Estimation, SingleCellMatchesPbdw)
{
  Bed s;
  const ReducedFamily fam = s.family(1);
  Rng rng(3);
  const StateVector u = solve_state(s.model, testing::random_point(rng, s.model.box()));
  const Observation obs = project_W(s.W, u);
  const SelectionResult sel = select_state(fam, s.model, s.W, obs);
  ASSERT_EQ(sel.cells.size(), 1u);
  EXPECT_EQ(sel.k_star, 0);
  const Reconstruction rec = reconstruct(fam.cell(0).space, s.W, obs);
  EXPECT_LE(testing::rel_diff(sel.u_star, rec.u_star), 1e-14);
  EXPECT_EQ(sel.cells[0].S, surrogate_S(s.model, rec.u_star, s.model.box()));
}

// A candidate whose space contains the truth reconstructs it exactly, so its
// surrogate vanishes and it is selected.
TEST(Estimation, ExactCandidateWins)
{
  Bed s;
  const ReducedFamily fam = s.family(4);
  std::vector<Candidate> cands = family_candidates(fam, s.model);
  Rng rng(11);
  const Vector y = testing::random_point(rng, s.model.box());
  const StateVector u = solve_state(s.model, y);
  Candidate exact{&s.model, {}, s.model.box()};
  exact.space.offset = u;
  exact.space.basis = Matrix(u.size(), 0);
  cands.push_back(exact);
  const SelectionResult sel = select_state(cands, s.W, project_W(s.W, u));
  EXPECT_EQ(sel.k_star, static_cast<int>(cands.size()) - 1);
  EXPECT_LE(sel.cells.back().S, 1e-7 * s.space->norm(u));
  EXPECT_LE(testing::rel_diff(sel.u_star, u), 1e-12);
}

TEST(Estimation, SelectionIsArgminOfSurrogate)
{
  Bed s;
  const ReducedFamily fam = s.family(8);
  Rng rng(17);
  for (int t = 0; t < 10; ++t)
  {
    const StateVector u =
        solve_state(s.model, testing::random_point(rng, s.model.box()));
    const SelectionResult sel = select_state(fam, s.model, s.W, project_W(s.W, u));
    ASSERT_EQ(sel.cells.size(), 8u);
    for (const CellEstimate& c : sel.cells)
    {
      if (c.ok)
      {
        EXPECT_GE(c.S, sel.cells[sel.k_star].S);
      }
    }
    for (int k = 0; k < sel.k_star; ++k)
      EXPECT_GT(sel.cells[k].S, sel.cells[sel.k_star].S);
    EXPECT_EQ(sel.y_star, sel.cells[sel.k_star].y);

    const int o = oracle_select(sel, *s.space, u);
    for (const CellEstimate& c : sel.cells)
      EXPECT_GE(s.space->norm(c.u_star - u), s.space->norm(sel.cells[o].u_star - u));
  }
}

TEST(Estimation, CellEstimatesAreDataConsistent)
{
  Bed s;
  const ReducedFamily fam = s.family(6);
  Rng rng(23);
  const StateVector u = solve_state(s.model, testing::random_point(rng, s.model.box()));
  const Observation obs = project_W(s.W, u);
  const SelectionResult sel = select_state(fam, s.model, s.W, obs);
  for (const CellEstimate& c : sel.cells)
  {
    ASSERT_TRUE(c.ok) << c.failure;
    EXPECT_LE((project_W(s.W, c.u_star).w - obs.w).norm(), 1e-10 * obs.w.norm());
    const Cell& cell = fam.cell(fam.cells_at(6)[c.k]);
    EXPECT_TRUE(cell.box.contains(c.y));
    EXPECT_EQ(c.bound, cell.space.mu * cell.space.eps);
  }
}

TEST(Estimation, PlausibleSetEmptyFarFromManifold)
{
  Bed s;
  const ReducedFamily fam = s.family(4);
  Rng rng(29);
  const StateVector u = solve_state(s.model, testing::random_point(rng, s.model.box()));
  // Data of u plus a large sensor-visible perturbation: no state of the
  // model explains it.
  const Vector dir = testing::random_vector(rng, s.W.m());
  const StateVector v = u + 10.0 * s.space->norm(u) * s.W.lift(dir / dir.norm());

  SelectionResult sel = select_state(fam, s.model, s.W, project_W(s.W, v));
  const std::vector<int> P = plausible_set(sel, 1.9);
  EXPECT_EQ(P, sel.plausible);
  EXPECT_TRUE(P.empty());

  SelectionResult sel_u = select_state(fam, s.model, s.W, project_W(s.W, u));
  for (int k : plausible_set(sel_u, 1.9))
    EXPECT_LE(sel_u.cells[k].S, 1.9 * sel_u.cells[k].bound);
}

TEST(Estimation, PlausibleSetThreshold)
{
  Bed s;
  const ReducedFamily fam = s.family(4);
  Rng rng(31);
  const StateVector u = solve_state(s.model, testing::random_point(rng, s.model.box()));
  SelectionResult sel = select_state(fam, s.model, s.W, project_W(s.W, u));
  EXPECT_TRUE(plausible_set(sel, 0.0).empty() ||
              sel.cells[sel.k_star].S == 0.0);
  const std::vector<int> all = plausible_set(sel, 1e300);
  EXPECT_EQ(all.size(), sel.cells.size());
}

TEST(ParameterEstimate, RecoversExactState)
{
  Bed s;
  Rng rng(37);
  for (int t = 0; t < 5; ++t)
  {
    const Vector y = testing::random_point(rng, s.model.box());
    const ParameterEstimate pe =
        estimate_parameter(s.model, solve_state(s.model, y), s.model.box(), true);
    EXPECT_LE((pe.y - y).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(pe.residual, 1e-9);
    ASSERT_TRUE(pe.state_distance.has_value());
    EXPECT_LE(*pe.state_distance, 1e-9);
    ASSERT_TRUE(pe.state_bound.has_value());
    EXPECT_LE(*pe.state_distance, *pe.state_bound + 1e-12);
  }
}

TEST(ParameterEstimate, StateBoundHoldsForPerturbedState)
{
  Bed s;
  Rng rng(41);
  const Vector y = testing::random_point(rng, s.model.box());
  StateVector u = solve_state(s.model, y);
  u += 0.05 * s.space->norm(u) * testing::random_vector(rng, u.size()) /
       std::sqrt(double(u.size()));
  const ParameterEstimate pe = estimate_parameter(s.model, u, s.model.box(), true);
  EXPECT_LE(*pe.state_distance, *pe.state_bound * (1 + 1e-9));
}

TEST(ParameterEstimate, ParameterFreeModelReturnsCenter)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space, 0.0);
  const StateVector u = solve_state(model, Vector::Zero(4));
  const ParameterEstimate pe = estimate_parameter(model, u, model.box());
  EXPECT_EQ(pe.y, model.box().center());
}

TEST(ParameterEstimate, CoefficientDistance)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space);
  const Vector a = Vector::Zero(4);
  Vector b = a;
  b[0] = 1.0;
  // Subdomain 0 is a quarter of the square; a differs there by c = 0.9.
  EXPECT_NEAR(coefficient_l2_distance(model, a, b), 0.9 * 0.5, 1e-12);
  EXPECT_EQ(coefficient_l2_distance(model, b, b), 0.0);
}

} // namespace
} // namespace nlrm
