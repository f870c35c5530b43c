/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_KERNELS_HPP
#define NLRM_KERNELS_HPP

#include <span>
#include <vector>

#include "nlrm/fem.hpp"

namespace nlrm
{

class AffineModel;
class MeasurementSpace;
class ParameterBox;
struct AffineReducedSpace;
struct SurrogateValue;

/**
 * Column-parallel batch kernels. Every OpenMP kernel writes each output
 * column from exactly one iteration and never reduces across threads, so its
 * result is bitwise identical to the `_serial` reference for any thread
 * count.
 */
namespace kernels
{

/// Column i = u(params[i]).
Matrix solve_states(const AffineModel& model, std::span<const Vector> params);
Matrix solve_states_serial(const AffineModel& model,
                           std::span<const Vector> params);

/// sqrt(r_i^T K r_i) for each column r_i of R.
Vector column_norms(const SparseMatrix& K, const Matrix& R);
Vector column_norms_serial(const SparseMatrix& K, const Matrix& R);

/// R <- R - phi (phi^T K R) for a V-normalized phi, refreshing `norms`.
void deflate_columns(const SparseMatrix& K, const Vector& phi, Matrix& R,
                     Vector& norms);
void deflate_columns_serial(const SparseMatrix& K, const Vector& phi,
                            Matrix& R, Vector& norms);

/// PBDW reconstructions u*(w_i) for each column w_i of `w`.
Matrix reconstruct_batch(const AffineReducedSpace& rs,
                         const MeasurementSpace& W, const Matrix& w);
Matrix reconstruct_batch_serial(const AffineReducedSpace& rs,
                                const MeasurementSpace& W, const Matrix& w);

/// Cell-restricted surrogate for each column of V.
std::vector<SurrogateValue> surrogate_batch(const AffineModel& model,
                                            const Matrix& V,
                                            const ParameterBox& cell);
std::vector<SurrogateValue> surrogate_batch_serial(const AffineModel& model,
                                                   const Matrix& V,
                                                   const ParameterBox& cell);

/// omp_get_max_threads(), or 1 without OpenMP.
int max_threads();
void set_threads(int n);

} // namespace kernels
} // namespace nlrm

#endif
