/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "nlrm/residual.hpp"
#include "support.hpp"

namespace nlrm
{
namespace
{

ResidualQuadratic make_quadratic(const Matrix& Q, const Vector& b, double c)
{
  ResidualQuadratic q;
  q.Q = Q;
  q.b = b;
  q.c = c;
  return q;
}

// Oracle: the lattice minimum over a (pts x pts) grid of the cell, d <= 2.
double lattice_min(const ResidualQuadratic& q, const ParameterBox& cell, int pts)
{
  const int d = q.dim();
  double best = std::numeric_limits<double>::infinity();
  Vector y(d);
  const int outer = d == 2 ? pts : 1;
  for (int i = 0; i < pts; ++i)
    for (int j = 0; j < outer; ++j)
    {
      y[0] = cell.lo()[0] + (cell.hi()[0] - cell.lo()[0]) * i / (pts - 1);
      if (d == 2)
        y[1] = cell.lo()[1] + (cell.hi()[1] - cell.lo()[1]) * j / (pts - 1);
      best = std::min(best, eval_residual(q, y));
    }
  return best;
}

TEST(Residual, VanishesAtTheExactSolution)
{
  auto space = testing::make_space(16);
  const AffineModel model = testing::grid_model(space);
  Rng rng(1);
  for (int t = 0; t < 5; ++t)
  {
    const Vector y0 = testing::random_point(rng, model.box());
    const ResidualQuadratic q = build_quadratic(model, solve_state(model, y0));
    EXPECT_LE(std::abs(q.direct_value(y0)), 1e-16 * q.c);
    EXPECT_LE(std::abs(eval_residual(q, y0)), 1e-12 * q.c);
  }
}

TEST(Residual, NoParameterDependence)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space, 0.0);
  Rng rng(1);
  const ResidualQuadratic q =
      build_quadratic(model, testing::random_vector(rng, space->n_dof()));
  EXPECT_EQ(q.Q.norm(), 0.0);
  EXPECT_EQ(q.b.norm(), 0.0);
}

// Oracle: ||K^{-1}(A(y) v - f(y))||_K^2 assembled from scratch.
TEST(Residual, QuadraticMatchesDirectAssembly)
{
  auto space = testing::make_space(16);
  const AffineModel model = build_model(space, Partition::test1_partition1, 1.0,
                                        Vector::Constant(4, 0.9));
  Rng rng(2);
  for (int t = 0; t < 10; ++t)
  {
    const Vector v = testing::random_vector(rng, space->n_dof(), 0.0, 0.1);
    const Vector y = testing::random_point(rng, model.box());
    const SparseMatrix A = assemble_weighted_stiffness(*space, model.diffusivity(y));
    const Vector r = A * v - assemble_load(*space, 1.0);
    const Vector e = Matrix(space->stiffness()).ldlt().solve(r);
    const double ref = e.dot(Matrix(space->stiffness()) * e);
    const ResidualQuadratic q = build_quadratic(model, v);
    EXPECT_NEAR(eval_residual(q, y), ref, 1e-10 * ref);
    EXPECT_NEAR(q.direct_value(y), ref, 1e-10 * ref);
    EXPECT_NEAR(eval_residual(q, Vector::Zero(4)), q.c, 1e-14 * q.c);
  }
}

TEST(Residual, GradientMatchesFiniteDifferences)
{
  auto space = testing::make_space(8);
  const AffineModel model = testing::grid_model(space);
  Rng rng(4);
  const ResidualQuadratic q =
      build_quadratic(model, testing::random_vector(rng, space->n_dof()));
  const Vector y = testing::random_point(rng, model.box());
  const Vector g = residual_gradient(q, y);
  const double step = 1e-5;
  for (int i = 0; i < 4; ++i)
  {
    Vector yp = y, ym = y;
    yp[i] += step;
    ym[i] -= step;
    const double fd = (eval_residual(q, yp) - eval_residual(q, ym)) / (2 * step);
    EXPECT_NEAR(g[i], fd, 1e-6 * (1 + std::abs(fd)));
  }
}

// Property: R is nonnegative, convex along random segments, and frames the
// error between r and R.
TEST(Residual, NonnegativeConvexAndFramed)
{
  auto space = testing::make_space(16);
  const AffineModel model = testing::grid_model(space);
  const auto [r, R] = ellipticity_bounds(model);
  Rng rng(5);
  for (int t = 0; t < 30; ++t)
  {
    const Vector y = testing::random_point(rng, model.box());
    Vector v = solve_state(model, testing::random_point(rng, model.box()));
    v += testing::random_vector(rng, space->n_dof(), -0.01, 0.01);
    const ResidualQuadratic q = build_quadratic(model, v);
    EXPECT_GE(eval_residual(q, y), -1e-12);
    const double ratio = std::sqrt(q.direct_value(y)) /
                         space->norm(v - solve_state(model, y));
    EXPECT_GE(ratio, r * (1 - 1e-9));
    EXPECT_LE(ratio, R * (1 + 1e-9));

    const Vector y2 = testing::random_point(rng, model.box());
    EXPECT_LE(eval_residual(q, 0.5 * (y + y2)),
              0.5 * (eval_residual(q, y) + eval_residual(q, y2)) + 1e-12);
  }
}

TEST(MinimizeBox, ClippedParabola)
{
  const ResidualQuadratic q =
      make_quadratic(Matrix::Identity(1, 1), Vector::Constant(1, 2.0), 4.0);
  const BoxQpResult r = minimize_box(q, ParameterBox::symmetric(1));
  EXPECT_DOUBLE_EQ(r.y[0], -1.0);
  EXPECT_NEAR(r.value, 1.0, 1e-14);
  EXPECT_TRUE(r.certified);
}

TEST(MinimizeBox, InteriorMinimum)
{
  for (int d : {1, 3, 6})
  {
    const ResidualQuadratic q =
        make_quadratic(Matrix::Identity(d, d), Vector::Zero(d), 0.0);
    const BoxQpResult r = minimize_box(q, ParameterBox::symmetric(d));
    EXPECT_EQ(r.y.norm(), 0.0);
    EXPECT_EQ(r.value, 0.0);
  }
}

TEST(MinimizeBox, ZeroCurvatureMovesToBound)
{
  Matrix Q = Matrix::Zero(2, 2);
  Q(1, 1) = 1.0;
  const ResidualQuadratic q = make_quadratic(Q, Vector(Vector::Unit(2, 0)), 1.0);
  const BoxQpResult r = minimize_box(q, ParameterBox::symmetric(2));
  EXPECT_DOUBLE_EQ(r.y[0], -1.0);
  EXPECT_TRUE(r.certified);
}

TEST(MinimizeBox, MatchesLatticeOracle)
{
  Rng rng(7);
  for (int t = 0; t < 20; ++t)
  {
    const int d = 1 + static_cast<int>(rng.below(2));
    const Matrix Q = testing::random_psd(rng, d, 1 + static_cast<int>(rng.below(d)));
    const Vector b = testing::random_vector(rng, d);
    const ResidualQuadratic q = make_quadratic(Q, b, 5.0);
    const Vector lo = testing::random_vector(rng, d, -1.0, 0.0);
    const ParameterBox cell(lo, lo + Vector::Constant(d, 1.0));
    const BoxQpResult r = minimize_box(q, cell);
    const double ref = lattice_min(q, cell, 2001);
    EXPECT_TRUE(cell.contains(r.y));
    EXPECT_LE(r.value, ref + 1e-12);
    EXPECT_NEAR(r.value, ref, 1e-6);
  }
}

// Property: the minimum is below every probe of a coarse lattice.
TEST(MinimizeBox, BelowCoarseLatticeProbes)
{
  auto space = testing::make_space(8);
  const AffineModel model = build_model(space, Partition::grid4x4, 1.0,
                                        Vector::Constant(16, 0.5));
  Rng rng(8);
  for (int t = 0; t < 5; ++t)
  {
    const ResidualQuadratic q =
        build_quadratic(model, testing::random_vector(rng, space->n_dof()));
    const BoxQpResult r = minimize_box(q, model.box());
    EXPECT_TRUE(r.certified);
    // 5 values on the first 4 coordinates, the rest at random.
    Vector y = testing::random_point(rng, model.box());
    for (int idx = 0; idx < 625; ++idx)
    {
      int rem = idx;
      for (int i = 0; i < 4; ++i, rem /= 5)
        y[i] = -1.0 + 0.5 * (rem % 5);
      EXPECT_LE(r.value, eval_residual(q, y) + 1e-12);
    }
  }
}

TEST(MinimizeBox, WarmStartReachesSameValue)
{
  Rng rng(9);
  const Matrix Q = testing::random_psd(rng, 4, 4);
  const ResidualQuadratic q = make_quadratic(Q, testing::random_vector(rng, 4), 3.0);
  const ParameterBox Y = ParameterBox::symmetric(4);
  const BoxQpResult a = minimize_box(q, Y);
  const BoxQpResult b = minimize_box(q, Y, 1e-10, Vector(Vector::Constant(4, 0.7)));
  EXPECT_NEAR(a.value, b.value, 1e-9);
}

TEST(Surrogate, ZeroOnManifoldAndBoundedOff)
{
  auto space = testing::make_space(16);
  const AffineModel model = testing::grid_model(space);
  const auto [r, R] = ellipticity_bounds(model);
  Rng rng(10);
  const ParameterBox cell(Vector::Constant(4, -0.5), Vector::Constant(4, 0.5));
  for (int t = 0; t < 5; ++t)
  {
    const Vector y0 = testing::random_point(rng, cell);
    const StateVector u0 = solve_state(model, y0);
    EXPECT_LE(surrogate_S(model, u0, cell), 1e-8);

    Vector g = testing::random_vector(rng, space->n_dof());
    g /= space->norm(g);
    const double delta = 1e-3;
    const double S = surrogate_S(model, u0 + delta * g, cell);
    EXPECT_LE(S, R * delta * (1 + 1e-9));
    EXPECT_GE(S, 0.0);
  }
}

// Oracle: r * (distance to a dense sample cloud of the cell's manifold part),
// corrected by the cloud's covering radius, bounds S from below.
TEST(Surrogate, SandwichAgainstDenseCloud)
{
  auto space = testing::make_space(8);
  const AffineModel model =
      build_model(space, Partition::grid2x2, 1.0, Vector::Constant(4, 0.5));
  const auto [r, R] = ellipticity_bounds(model);
  const ParameterBox cell = ParameterBox::symmetric(4);
  const SnapshotSet cloud = sample_snapshots(model, 3000, 77);
  Rng rng(11);
  for (int t = 0; t < 5; ++t)
  {
    const StateVector v =
        solve_state(model, testing::random_point(rng, cell)) +
        testing::random_vector(rng, space->n_dof(), -0.005, 0.005);
    double dist_hat = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < cloud.states.cols(); ++i)
      dist_hat = std::min(dist_hat, space->norm(v - cloud.states.col(i)));
    const double S = surrogate_S(model, v, cell);
    // S <= R dist(v, M) <= R dist_hat
    EXPECT_LE(S, R * dist_hat * (1 + 1e-9));
    // The minimizer's state is at least as far as the true distance.
    const SurrogateValue sv = surrogate(build_quadratic(model, v), cell);
    EXPECT_GE(S, r * space->norm(v - solve_state(model, sv.y)) * (1 - 1e-9));
  }
}

} // namespace
} // namespace nlrm
