/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_MEASUREMENT_HPP
#define NLRM_MEASUREMENT_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlrm/fem.hpp"

namespace nlrm
{

/// Square averaging window [x0, x0+width] x [y0, y0+width].
struct MeasurementBox
{
  double x0, y0, width;
};

enum class Placement
{
  random,
  evenly_spaced,
  given, // boxes supplied explicitly (replay)
};

std::string to_string(Placement p);
Placement placement_from_string(std::string_view name);

struct MeasurementLayout
{
  Placement placement = Placement::random;
  std::uint64_t seed = 0;
  double box_width = 0.0;
  std::vector<MeasurementBox> boxes;
};

/**
 * Local-average functionals l_i(u) = |B_i|^-1 int_{B_i} u, their Riesz
 * representers omega_i (in the V-inner product) and a V-orthonormal basis
 * psi of W = span{omega_i}, psi = omega * M^T.
 */
class MeasurementSpace
{
public:
  MeasurementSpace(std::shared_ptr<const DiscreteSpace> space,
                   MeasurementLayout layout);

  int m() const { return static_cast<int>(ell_.cols()); }
  const DiscreteSpace& space() const { return *space_; }
  const MeasurementLayout& layout() const { return layout_; }

  /// Dual vectors (columns): l_i(v) = ell.col(i) . v
  const Matrix& ell() const { return ell_; }
  const Matrix& omega() const { return omega_; }
  const Matrix& psi() const { return psi_; }
  /// K * psi, cached for projections.
  const Matrix& K_psi() const { return K_psi_; }
  /// Row j holds the coefficients of psi_j in the representer basis.
  const Matrix& transform() const { return M_; }
  double transform_norm() const { return M_norm_; }

  /// Raw measurements z = l(u).
  Vector measure(const StateVector& u) const;
  /// Element of W with psi-coordinates w.
  StateVector lift(const Vector& w) const { return psi_ * w; }

private:
  std::shared_ptr<const DiscreteSpace> space_;
  MeasurementLayout layout_;
  Matrix ell_, omega_, psi_, K_psi_, M_;
  double M_norm_ = 0.0;
};

MeasurementSpace build_measurements(std::shared_ptr<const DiscreteSpace> space,
                                    Placement placement, int m,
                                    double box_width, std::uint64_t seed = 0);

/// Replay from a stored layout (boxes taken verbatim).
MeasurementSpace build_measurements(std::shared_ptr<const DiscreteSpace> space,
                                    const MeasurementLayout& layout);

struct Observation
{
  Vector w; // psi-coordinates of the observed element of W
  std::optional<Vector> z;
  std::optional<Vector> noise;
  double eps_noise = 0.0; // ||M|| * ||noise||_2
};

Observation project_W(const MeasurementSpace& W, const StateVector& u);

/// z = l(u) + eta with eta i.i.d. uniform on [-noise_level, noise_level].
Observation observe_noisy(const MeasurementSpace& W, const StateVector& u,
                          double noise_level, std::uint64_t seed);

/// Observation from raw measurements z (w = M z).
Observation observe_raw(const MeasurementSpace& W, const Vector& z);

} // namespace nlrm

#endif
