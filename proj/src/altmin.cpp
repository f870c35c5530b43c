/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/altmin.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace nlrm
{

namespace
{

constexpr double kMaxGramCondition = 1e12;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace

BoxQpResult y_step(const AffineModel& model, const StateVector& u,
                   const std::optional<Vector>& start)
{
  const ResidualQuadratic q = build_quadratic(model, u);
  BoxQpResult r = minimize_box(q, model.box(), 1e-10, start);
  // The expanded quadratic loses absolute accuracy near zero residual, which
  // the square root amplifies; report the directly evaluated value instead.
  r.value = q.direct_value(r.y);
  return r;
}

StateVector apply_S(const AffineModel& model, const Vector& y,
                    const StateVector& v)
{
  return SpdSolver(model.operator_at(y)).solve(Vector(model.space().stiffness() * v));
}

StateVector apply_T(const AffineModel& model, const Vector& y,
                    const StateVector& v)
{
  return model.space().stiffness_solver().solve(Vector(model.operator_at(y) * v));
}

VStepResult v_step(const AffineModel& model, const MeasurementSpace& W,
                   const Vector& w, const Vector& y)
{
  if (w.size() != W.m())
    throw std::invalid_argument("v_step: observation length != m");
  const SparseMatrix& K = model.space().stiffness();
  const SpdSolver& Ksolve = model.space().stiffness_solver();
  const long before = spd_solve_count();

  const SparseMatrix Ay = model.operator_at(y);
  const SpdSolver Asolve(Ay);

  const StateVector w_lift = W.lift(w);
  const StateVector Tw = Ksolve.solve(Vector(Ay * w_lift));
  const StateVector g = Ksolve.solve(model.rhs_at(y));

  VStepResult out;
  out.SW = Asolve.solve(W.K_psi());
  StateVector z = g;
  if (W.m() > 0)
  {
    const Matrix KSW = K * out.SW;
    Matrix gram = out.SW.transpose() * KSW;
    gram = 0.5 * (gram + gram.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > kMaxGramCondition)
      throw SolverError("v_step: Gram matrix of S(W) is ill-conditioned");
    const Vector rhs = KSW.transpose() * (g - Tw);
    const Vector coef = eig.eigenvectors() *
                        (eig.eigenvalues().cwiseInverse().asDiagonal() *
                         (eig.eigenvectors().transpose() * rhs));
    z -= out.SW * coef;
  }
  out.v = Asolve.solve(Vector(K * z));
  out.solves = spd_solve_count() - before;
  return out;
}

AltMinState run_altmin(const AffineModel& model, const MeasurementSpace& W,
                       const Observation& obs, const StateVector& u0,
                       const AltMinOptions& options,
                       const std::optional<Vector>& y0)
{
  AltMinState st;
  st.u = u0;
  auto t0 = std::chrono::steady_clock::now();
  BoxQpResult yr = y_step(model, st.u, y0);
  st.y = yr.y;
  double res = std::sqrt(std::max(0.0, yr.value));
  st.history.push_back(res);
  st.steps.push_back({res, seconds_since(t0), 0.0});
  st.stop_reason = "max_iters";

  for (int it = 0; it < options.max_iters; ++it)
  {
    AltMinStep step;
    try
    {
      t0 = std::chrono::steady_clock::now();
      VStepResult vr = v_step(model, W, obs.w, st.y);
      step.v_seconds = seconds_since(t0);
      t0 = std::chrono::steady_clock::now();
      yr = y_step(model, vr.v, st.y);
      step.y_seconds = seconds_since(t0);
      st.u = std::move(vr.v);
      st.SW = std::move(vr.SW);
    }
    catch (const std::exception& e)
    {
      st.stop_reason = std::string("error: ") + e.what();
      break;
    }
    st.y = yr.y;
    const double next = std::sqrt(std::max(0.0, yr.value));
    step.residual = next;
    st.history.push_back(next);
    st.steps.push_back(step);
    st.iterations = it + 1;
    if (res - next < options.tol * (1.0 + next))
    {
      st.stop_reason = "converged";
      break;
    }
    res = next;
  }
  return st;
}

AltMinState run_altmin(const AffineModel& model, const MeasurementSpace& W,
                       const Observation& obs, const SelectionResult& init,
                       const AltMinOptions& options)
{
  return run_altmin(model, W, obs, init.u_star, options, init.y_star);
}

} // namespace nlrm
