/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <gtest/gtest.h>

#include "nlrm/pbdw.hpp"
#include "support.hpp"

namespace nlrm
{
namespace
{

// Oracle: min_{v, c} ||v - offset - B c||_K^2 subject to l_i(v) = l_i(u) for
// the raw representers, as one dense KKT system.
Vector dense_kkt(const Matrix& K, const Matrix& omega, const Vector& offset,
                 const Matrix& B, const Vector& u)
{
  const int N = static_cast<int>(K.rows());
  const int n = static_cast<int>(B.cols());
  const int m = static_cast<int>(omega.cols());
  Matrix H = Matrix::Zero(N + n, N + n);
  H.topLeftCorner(N, N) = K;
  H.topRightCorner(N, n) = -K * B;
  H.bottomLeftCorner(n, N) = -B.transpose() * K;
  H.bottomRightCorner(n, n) = B.transpose() * K * B;
  Vector g(N + n);
  g.head(N) = K * offset;
  g.tail(n) = -B.transpose() * K * offset;
  const Matrix C = omega.transpose() * K; // m x N

  Matrix kkt = Matrix::Zero(N + n + m, N + n + m);
  kkt.topLeftCorner(N + n, N + n) = H;
  kkt.block(0, N + n, N, m) = C.transpose();
  kkt.block(N + n, 0, m, N) = C;
  Vector rhs(N + n + m);
  rhs.head(N + n) = g;
  rhs.tail(m) = C * u;
  return kkt.fullPivLu().solve(rhs).head(N);
}

struct Bed
{
  std::shared_ptr<const DiscreteSpace> space = testing::make_space(8);
  AffineModel model = testing::grid_model(space);
  MeasurementSpace W = testing::random_sensors(space, 6, 4, 1);
  RBHierarchy h;
  Bed()
  {
    const SnapshotSet train = sample_snapshots(model, 80, 1);
    h = greedy_hierarchy(*space, train.states,
                         solve_state(model, Vector::Zero(4)), 6);
    attach_stability(h, W);
  }
};

TEST(Pbdw, ExactOnTheReducedSpace)
{
  Bed s;
  Rng rng(3);
  for (int n = 0; n <= 4; ++n)
  {
    const AffineReducedSpace rs = s.h.space(n);
    const Vector u = rs.offset + rs.basis * testing::random_vector(rng, n);
    const Reconstruction r = reconstruct(rs, s.W, project_W(s.W, u));
    EXPECT_LE(s.space->norm(u - r.u_star), 1e-8 * s.space->norm(u));
  }
}

TEST(Pbdw, MatchesDenseKktOracle)
{
  Bed s;
  const Matrix K = Matrix(s.space->stiffness());
  Rng rng(5);
  for (int n = 0; n <= 5; ++n)
  {
    const AffineReducedSpace rs = s.h.space(n);
    for (int t = 0; t < 5; ++t)
    {
      const Vector u = testing::random_vector(rng, s.space->n_dof());
      const Reconstruction r = reconstruct(rs, s.W, project_W(s.W, u));
      const Vector ref = dense_kkt(K, s.W.omega(), rs.offset, rs.basis, u);
      EXPECT_LE(s.space->norm(r.u_star - ref), 1e-7 * s.space->norm(ref));
    }
  }
}

TEST(Pbdw, DataConsistentAndBoundedByMuTimesDistance)
{
  Bed s;
  Rng rng(6);
  for (int t = 0; t < 20; ++t)
  {
    const Vector y = testing::random_point(rng, s.model.box());
    const Vector u = solve_state(s.model, y);
    const Observation obs = project_W(s.W, u);
    for (int n = 0; n <= 6; ++n)
    {
      const AffineReducedSpace rs = s.h.space(n);
      const Reconstruction r = reconstruct(rs, s.W, obs);
      EXPECT_LT((s.W.K_psi().transpose() * r.u_star - obs.w).norm(),
                1e-10 * (1 + obs.w.norm()));
      EXPECT_LE(s.space->norm(u - r.u_star),
                rs.mu * dist_to_space(*s.space, rs, u) + 1e-10);
    }
  }
}

TEST(Pbdw, RefusesUnstablePairs)
{
  auto space = testing::make_space(8);
  const MeasurementSpace W = testing::random_sensors(space, 1, 3, 1);
  Rng rng(2);
  Vector v = testing::random_vector(rng, space->n_dof());
  v -= W.lift(project_W(W, v).w);
  AffineReducedSpace rs;
  rs.offset = Vector::Zero(space->n_dof());
  rs.basis = v / space->norm(v);
  EXPECT_THROW(reconstruct(rs, W, project_W(W, v)), StabilityError);

  AffineReducedSpace big;
  big.offset = rs.offset;
  big.basis = Matrix::Identity(space->n_dof(), 2);
  EXPECT_THROW(reconstruct(big, W, project_W(W, v)), StabilityError);
}

} // namespace
} // namespace nlrm
