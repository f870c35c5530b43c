/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_TESTS_SUPPORT_HPP
#define NLRM_TESTS_SUPPORT_HPP

#include <memory>

#include "nlrm/measurement.hpp"
#include "nlrm/parametric_model.hpp"
#include "nlrm/rng.hpp"

namespace nlrm::testing
{

// Small random generators for the property tests.

inline Vector random_vector(Rng& rng, int n, double lo = -1.0,
                            double hi = 1.0)
{
  Vector v(n);
  for (int i = 0; i < n; ++i)
    v[i] = rng.uniform(lo, hi);
  return v;
}

inline Vector random_point(Rng& rng, const ParameterBox& box)
{
  Vector y(box.dim());
  for (int i = 0; i < box.dim(); ++i)
    y[i] = rng.uniform(box.lo()[i], box.hi()[i]);
  return y;
}

/// Symmetric PSD with eigenvalues in [0, scale], rank r.
inline Matrix random_psd(Rng& rng, int d, int r, double scale = 1.0)
{
  Matrix B(r, d);
  for (int i = 0; i < r; ++i)
    B.row(i) = random_vector(rng, d).transpose();
  Matrix Q = B.transpose() * B;
  const double top = Q.norm();
  if (top > 0)
    Q *= scale / top;
  return 0.5 * (Q + Q.transpose());
}

inline std::shared_ptr<const DiscreteSpace> make_space(int n_per_side)
{
  return std::make_shared<const DiscreteSpace>(Grid(n_per_side));
}

/// -div((1 + sum c_l y_l 1_{D_l}) grad u) = 1 on the 2x2 grid partition.
inline AffineModel grid_model(std::shared_ptr<const DiscreteSpace> space,
                              double c = 0.9)
{
  return build_model(space, Partition::grid2x2, 1.0, Vector::Constant(4, c));
}

inline MeasurementSpace random_sensors(std::shared_ptr<const DiscreteSpace> space,
                                       int m, std::uint64_t seed,
                                       int width_cells = 1)
{
  return build_measurements(space, Placement::random, m,
                            width_cells * space->grid().h(), seed);
}

inline double rel_diff(const Vector& a, const Vector& b)
{
  return (a - b).norm() / std::max(1e-300, b.norm());
}

} // namespace nlrm::testing

#endif
