/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include "nlrm/parametric_model.hpp"
#include "support.hpp"

namespace nlrm
{
namespace
{

TEST(ParameterBox, ValidatesAndSplitsAtMidpoint)
{
  EXPECT_THROW(ParameterBox(Vector::Constant(2, 1.0), Vector::Constant(2, 1.0)),
               std::invalid_argument);
  const ParameterBox Y = ParameterBox::symmetric(3);
  const auto [lo, hi] = Y.split(1);
  EXPECT_EQ(lo.hi()[1], 0.0);
  EXPECT_EQ(hi.lo()[1], 0.0);
  EXPECT_EQ(lo.lo(), Y.lo());
  EXPECT_DOUBLE_EQ(lo.volume() + hi.volume(), Y.volume());
}

// Property: after random dyadic refinement, every point of Y is owned by
// exactly one leaf (including points on the upper faces of Y).
TEST(ParameterBox, DyadicLeavesPartitionTheRoot)
{
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial)
  {
    const int d = 1 + static_cast<int>(rng.below(4));
    const ParameterBox Y = ParameterBox::symmetric(d);
    std::vector<ParameterBox> leaves{Y};
    for (int s = 0; s < 15; ++s)
    {
      const std::size_t k = rng.below(leaves.size());
      auto [a, b] = leaves[k].split(static_cast<int>(rng.below(d)));
      leaves[k] = a;
      leaves.push_back(b);
    }
    double vol = 0.0;
    for (const auto& l : leaves)
      vol += l.volume();
    EXPECT_DOUBLE_EQ(vol, Y.volume());

    for (int p = 0; p < 200; ++p)
    {
      Vector y = testing::random_point(rng, Y);
      // Snap some coordinates onto dyadic faces.
      for (int i = 0; i < d; ++i)
        if (rng.below(3) == 0)
          y[i] = -1.0 + 0.25 * static_cast<double>(rng.below(9));
      int owners = 0;
      for (const auto& l : leaves)
        owners += l.owns(y, Y);
      EXPECT_EQ(owners, 1) << y.transpose();
    }
  }
}

TEST(Partition, RoundTripsNames)
{
  for (Partition p : {Partition::grid2x2, Partition::grid4x4,
                      Partition::test1_partition1, Partition::test1_partition2})
    EXPECT_EQ(partition_from_string(to_string(p)), p);
  EXPECT_THROW(partition_from_string("nope"), std::invalid_argument);
  EXPECT_EQ(partition_cells(Partition::grid4x4).size(), 16u);
}

TEST(AffineModel, GridModelPieces)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space);
  EXPECT_EQ(model.dim(), 4);
  EXPECT_LT(Matrix(model.A(0) - space->stiffness()).norm(), 1e-13);
  for (int j = 1; j <= 4; ++j)
    EXPECT_EQ(model.f(j).norm(), 0.0);
  // sum_j A_j / c = K since the subdomains tile the square.
  SparseMatrix sum = model.A(1);
  for (int j = 2; j <= 4; ++j)
    sum += model.A(j);
  EXPECT_LT(Matrix(sum / 0.9 - space->stiffness()).norm(), 1e-12);
}

TEST(AffineModel, OperatorAtMatchesDirectAssembly)
{
  auto space = testing::make_space(8);
  const AffineModel model = build_model(space, Partition::test1_partition1, 1.0,
                                        Vector::Constant(4, 0.9));
  Rng rng(9);
  for (int t = 0; t < 5; ++t)
  {
    const Vector y = testing::random_point(rng, model.box());
    const SparseMatrix direct =
        assemble_weighted_stiffness(*space, model.diffusivity(y));
    EXPECT_LT(Matrix(model.operator_at(y) - direct).norm(), 1e-12);
  }
}

TEST(AffineModel, EllipticityBounds)
{
  auto space = testing::make_space(4);
  const auto b = ellipticity_bounds(testing::grid_model(space, 0.9));
  EXPECT_NEAR(b.r, 0.1, 1e-15);
  EXPECT_NEAR(b.R, 1.9, 1e-15);

  const auto b0 = ellipticity_bounds(
      build_model(space, Partition::grid2x2, 2.0, Vector::Zero(4)));
  EXPECT_EQ(b0.r, 2.0);
  EXPECT_EQ(b0.R, 2.0);

  Vector c(4);
  for (int l = 1; l <= 4; ++l)
    c[l - 1] = 0.99 / l;
  EXPECT_NEAR(ellipticity_bounds(build_model(space, Partition::grid2x2, 1.0, c)).r,
              0.01, 1e-15);
}

TEST(AffineModel, SolveStateRejectsOutsideBox)
{
  auto space = testing::make_space(4);
  const AffineModel model = testing::grid_model(space);
  EXPECT_THROW(solve_state(model, Vector::Constant(4, 1.5)), std::out_of_range);
}

// Oracle: dense solve of the assembled system.
TEST(AffineModel, SolveStateMatchesDense)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space);
  Rng rng(1);
  for (int t = 0; t < 5; ++t)
  {
    const Vector y = testing::random_point(rng, model.box());
    const Vector ref =
        Matrix(model.operator_at(y)).partialPivLu().solve(model.rhs_at(y));
    EXPECT_LT(testing::rel_diff(solve_state(model, y), ref), 1e-12);
  }
}

TEST(AffineModel, MirroredPartitionsGiveMirroredStates)
{
  auto space = testing::make_space(16);
  const Vector c = Vector::Constant(4, 0.9);
  const AffineModel m1 = build_model(space, Partition::test1_partition1, 1.0, c);
  const AffineModel m2 = build_model(space, Partition::test1_partition2, 1.0, c);
  const std::vector<int> perm = mirror_permutation(space->grid());
  Rng rng(4);
  for (int t = 0; t < 5; ++t)
  {
    const Vector y = testing::random_point(rng, m1.box());
    const StateVector u1 = solve_state(m1, y);
    const StateVector u2 = solve_state(m2, mirror_parameter(y));
    Vector pu2(u2.size());
    for (int d = 0; d < u2.size(); ++d)
      pu2[d] = u2[perm[d]];
    EXPECT_LT(testing::rel_diff(u1, pu2), 1e-12);
  }
}

TEST(AffineModel, ConstantCoefficientStateIsReference)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space);
  const Vector ref = solve_spd(space->stiffness(), assemble_load(*space, 1.0));
  EXPECT_LT(testing::rel_diff(solve_state(model, Vector::Zero(4)), ref), 1e-13);
}

TEST(Snapshots, DeterministicAndInsideBox)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space);
  const SnapshotSet a = sample_snapshots(model, 20, 42);
  const SnapshotSet b = sample_snapshots(model, 20, 42);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    EXPECT_TRUE(model.box().contains(a.parameters[i]));
    EXPECT_EQ(a.parameters[i], b.parameters[i]);
  }
  EXPECT_EQ(a.states, b.states);
  EXPECT_LT(testing::rel_diff(a.states.col(3),
                              solve_state(model, a.parameters[3])),
            1e-14);
}

} // namespace
} // namespace nlrm
