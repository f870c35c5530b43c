/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/residual.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace nlrm
{

double ResidualQuadratic::direct_value(const Vector& y) const
{
  Vector t(dim() + 1);
  t[0] = 1.0;
  t.tail(dim()) = y;
  return (lifts * t).dot(duals * t);
}

ResidualQuadratic build_quadratic(const AffineModel& model,
                                  const StateVector& v)
{
  const int d = model.dim();
  if (v.size() != model.space().n_dof())
    throw std::invalid_argument("build_quadratic: state dimension mismatch");

  ResidualQuadratic q;
  q.duals.resize(v.size(), d + 1);
  for (int j = 0; j <= d; ++j)
    q.duals.col(j) = model.A(j) * v - model.f(j);
  q.lifts = model.space().stiffness_solver().solve(q.duals);

  Matrix gram = q.lifts.transpose() * q.duals;
  gram = 0.5 * (gram + gram.transpose());
  q.c = gram(0, 0);
  q.b = gram.col(0).tail(d);
  q.Q = gram.bottomRightCorner(d, d);
  return q;
}

double eval_residual(const ResidualQuadratic& q, const Vector& y)
{
  return y.dot(q.Q * y) + 2.0 * q.b.dot(y) + q.c;
}

Vector residual_gradient(const ResidualQuadratic& q, const Vector& y)
{
  return 2.0 * (q.Q * y + q.b);
}

BoxQpResult minimize_box(const ResidualQuadratic& q, const ParameterBox& cell,
                         double tol, const std::optional<Vector>& start)
{
  const int d = q.dim();
  if (cell.dim() != d)
    throw std::invalid_argument("minimize_box: cell dimension mismatch");

  BoxQpResult res;
  res.y = start ? cell.clip(*start) : cell.center();
  if (d == 0)
  {
    res.value = q.c;
    res.certified = true;
    return res;
  }

  double L = Eigen::SelfAdjointEigenSolver<Matrix>(q.Q, Eigen::EigenvaluesOnly)
                 .eigenvalues()
                 .maxCoeff();
  if (!(L > 0.0))
    L = 1.0;

  Vector& y = res.y;
  Vector g = q.Q * y + q.b; // half gradient
  auto measure = [&] {
    const Vector step = cell.clip(y - (2.0 / L) * g);
    return (y - step).cwiseAbs().maxCoeff();
  };

  const long cap = 10000L * d;
  res.optimality = measure();
  while (res.optimality > tol && res.iterations < cap)
  {
    for (int i = 0; i < d && res.iterations < cap; ++i, ++res.iterations)
    {
      const double qii = q.Q(i, i);
      double yi;
      if (qii > 0.0)
        yi = y[i] - g[i] / qii;
      else
        yi = g[i] > 0.0 ? cell.lo()[i] : (g[i] < 0.0 ? cell.hi()[i] : y[i]);
      yi = std::clamp(yi, cell.lo()[i], cell.hi()[i]);
      const double delta = yi - y[i];
      if (delta != 0.0)
      {
        y[i] = yi;
        g += delta * q.Q.col(i);
      }
    }
    // Refresh the running gradient to keep drift out of the stopping test.
    g = q.Q * y + q.b;
    res.optimality = measure();
  }
  res.certified = res.optimality <= tol;
  res.value = eval_residual(q, y);
  return res;
}

SurrogateValue surrogate(const ResidualQuadratic& q, const ParameterBox& cell,
                         double tol)
{
  const BoxQpResult qp = minimize_box(q, cell, tol);
  return {std::sqrt(std::max(0.0, q.direct_value(qp.y))), qp.y, qp.certified};
}

double surrogate_S(const AffineModel& model, const StateVector& v,
                   const ParameterBox& cell)
{
  return surrogate(build_quadratic(model, v), cell).S;
}

} // namespace nlrm
