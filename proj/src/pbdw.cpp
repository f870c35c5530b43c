/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/pbdw.hpp"

#include <algorithm>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace nlrm
{

namespace
{

// Both bases are V-orthonormal, so the cross-Gramian's singular values are
// cosines in [0, 1]; the floor is relative to max(sigma_max, 1).
constexpr double kRelativeSingular = 1e-10;

} // namespace

Reconstruction reconstruct(const AffineReducedSpace& rs,
                           const MeasurementSpace& W, const Observation& obs)
{
  if (obs.w.size() != W.m())
    throw std::invalid_argument("reconstruct: observation length != m");
  if (rs.dim() > W.m())
    throw StabilityError("reconstruct: dim(V_n) > dim(W)", kInfiniteMu);

  Reconstruction out;
  const Vector residual_w = obs.w - W.K_psi().transpose() * rs.offset;
  if (rs.dim() == 0)
  {
    out.coeffs.resize(0);
    out.v_star = rs.offset;
  }
  else
  {
    const Matrix G = rs.basis.transpose() * W.K_psi(); // n x m
    Eigen::JacobiSVD<Matrix> svd(G);
    const auto& s = svd.singularValues();
    if (s(rs.dim() - 1) < kRelativeSingular * std::max(s(0), 1.0))
      throw StabilityError("reconstruct: cross-Gramian is near singular",
                           s(rs.dim() - 1) > 0 ? 1.0 / s(rs.dim() - 1)
                                               : kInfiniteMu);
    out.coeffs = G.transpose().colPivHouseholderQr().solve(residual_w);
    out.v_star = rs.offset + rs.basis * out.coeffs;
  }
  const Vector gap = obs.w - W.K_psi().transpose() * out.v_star;
  out.u_star = out.v_star + W.psi() * gap;
  return out;
}

} // namespace nlrm
