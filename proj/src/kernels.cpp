/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/kernels.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

#include "nlrm/parametric_model.hpp"
#include "nlrm/pbdw.hpp"
#include "nlrm/residual.hpp"

namespace nlrm::kernels
{

namespace
{

// Exceptions must not escape an OpenMP region; the first one is rethrown
// after the loop.
class ErrorSlot
{
public:
  template <class F>
  void run(F&& f)
  {
    try
    {
      f();
    }
    catch (...)
    {
#pragma omp critical(nlrm_kernel_error)
      if (!error_)
        error_ = std::current_exception();
    }
  }
  void rethrow() const
  {
    if (error_)
      std::rethrow_exception(error_);
  }

private:
  std::exception_ptr error_;
};

Observation as_observation(const Matrix& w, Eigen::Index i)
{
  Observation obs;
  obs.w = w.col(i);
  return obs;
}

} // namespace

Matrix solve_states(const AffineModel& model, std::span<const Vector> params)
{
  const auto N = static_cast<long>(params.size());
  Matrix out(model.space().n_dof(), N);
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < N; ++i)
    err.run([&] { out.col(i) = solve_state(model, params[i]); });
  err.rethrow();
  return out;
}

Matrix solve_states_serial(const AffineModel& model,
                           std::span<const Vector> params)
{
  Matrix out(model.space().n_dof(), static_cast<long>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i)
    out.col(static_cast<long>(i)) = solve_state(model, params[i]);
  return out;
}

Vector column_norms(const SparseMatrix& K, const Matrix& R)
{
  Vector out(R.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < R.cols(); ++i)
    out[i] = std::sqrt(std::max(0.0, R.col(i).dot(K * R.col(i))));
  return out;
}

Vector column_norms_serial(const SparseMatrix& K, const Matrix& R)
{
  Vector out(R.cols());
  for (Eigen::Index i = 0; i < R.cols(); ++i)
    out[i] = std::sqrt(std::max(0.0, R.col(i).dot(K * R.col(i))));
  return out;
}

void deflate_columns(const SparseMatrix& K, const Vector& phi, Matrix& R,
                     Vector& norms)
{
  const Vector Kphi = K * phi;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < R.cols(); ++i)
  {
    R.col(i) -= R.col(i).dot(Kphi) * phi;
    norms[i] = std::sqrt(std::max(0.0, R.col(i).dot(K * R.col(i))));
  }
}

void deflate_columns_serial(const SparseMatrix& K, const Vector& phi,
                            Matrix& R, Vector& norms)
{
  const Vector Kphi = K * phi;
  for (Eigen::Index i = 0; i < R.cols(); ++i)
  {
    R.col(i) -= R.col(i).dot(Kphi) * phi;
    norms[i] = std::sqrt(std::max(0.0, R.col(i).dot(K * R.col(i))));
  }
}

Matrix reconstruct_batch(const AffineReducedSpace& rs,
                         const MeasurementSpace& W, const Matrix& w)
{
  Matrix out(rs.offset.size(), w.cols());
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < w.cols(); ++i)
    err.run([&] { out.col(i) = reconstruct(rs, W, as_observation(w, i)).u_star; });
  err.rethrow();
  return out;
}

Matrix reconstruct_batch_serial(const AffineReducedSpace& rs,
                                const MeasurementSpace& W, const Matrix& w)
{
  Matrix out(rs.offset.size(), w.cols());
  for (Eigen::Index i = 0; i < w.cols(); ++i)
    out.col(i) = reconstruct(rs, W, as_observation(w, i)).u_star;
  return out;
}

std::vector<SurrogateValue> surrogate_batch(const AffineModel& model,
                                            const Matrix& V,
                                            const ParameterBox& cell)
{
  std::vector<SurrogateValue> out(V.cols());
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < V.cols(); ++i)
    err.run([&] {
      out[i] = surrogate(build_quadratic(model, V.col(i)), cell);
    });
  err.rethrow();
  return out;
}

std::vector<SurrogateValue> surrogate_batch_serial(const AffineModel& model,
                                                   const Matrix& V,
                                                   const ParameterBox& cell)
{
  std::vector<SurrogateValue> out(V.cols());
  for (Eigen::Index i = 0; i < V.cols(); ++i)
    out[i] = surrogate(build_quadratic(model, V.col(i)), cell);
  return out;
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n)
{
  if (n > 0)
    omp_set_num_threads(n);
}

} // namespace nlrm::kernels
