/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Serial reference vs OpenMP kernels. Each pair runs on identical inputs;
// the range argument is the grid size (nodes per side).

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "nlrm/kernels.hpp"
#include "nlrm/measurement.hpp"
#include "nlrm/parametric_model.hpp"
#include "nlrm/reduced_basis.hpp"
#include "nlrm/residual.hpp"
#include "nlrm/rng.hpp"

namespace
{

using namespace nlrm;

struct Fixture
{
  std::shared_ptr<const DiscreteSpace> space;
  AffineModel model;
  MeasurementSpace W;
  std::vector<Vector> params;
  Matrix states;
  AffineReducedSpace rs;
  Matrix obs;

  explicit Fixture(int n)
      : space(std::make_shared<const DiscreteSpace>(Grid(n))),
        model(build_model(space, Partition::grid2x2, 1.0, Vector::Constant(4, 0.9))),
        W(build_measurements(space, Placement::evenly_spaced, 16,
                             2 * space->grid().h()))
  {
    Rng rng(1);
    for (int i = 0; i < 64; ++i)
    {
      Vector y(4);
      for (int j = 0; j < 4; ++j)
        y[j] = rng.uniform(-1.0, 1.0);
      params.push_back(y);
    }
    states = kernels::solve_states_serial(model, params);
    RBHierarchy h = greedy_hierarchy(*space, states,
                                     solve_state(model, Vector::Zero(4)), 8);
    rs = h.space(8);
    obs = W.K_psi().transpose() * states;
  }
};

const Fixture& fixture(int n)
{
  static std::vector<std::unique_ptr<Fixture>> cache;
  for (const auto& f : cache)
    if (f->space->grid().n_per_side() == n)
      return *f;
  cache.push_back(std::make_unique<Fixture>(n));
  return *cache.back();
}

template <bool Parallel>
void BM_SolveStates(benchmark::State& st)
{
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? kernels::solve_states(f.model, f.params)
                                      : kernels::solve_states_serial(f.model, f.params));
}

template <bool Parallel>
void BM_ColumnNorms(benchmark::State& st)
{
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  const SparseMatrix& K = f.space->stiffness();
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? kernels::column_norms(K, f.states)
                                      : kernels::column_norms_serial(K, f.states));
}

template <bool Parallel>
void BM_Deflate(benchmark::State& st)
{
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  const SparseMatrix& K = f.space->stiffness();
  const Vector phi = f.rs.basis.col(0);
  for (auto _ : st)
  {
    st.PauseTiming();
    Matrix R = f.states;
    Vector norms(R.cols());
    st.ResumeTiming();
    if (Parallel)
      kernels::deflate_columns(K, phi, R, norms);
    else
      kernels::deflate_columns_serial(K, phi, R, norms);
    benchmark::DoNotOptimize(R.data());
  }
}

template <bool Parallel>
void BM_ReconstructBatch(benchmark::State& st)
{
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel
                                 ? kernels::reconstruct_batch(f.rs, f.W, f.obs)
                                 : kernels::reconstruct_batch_serial(f.rs, f.W, f.obs));
}

template <bool Parallel>
void BM_SurrogateBatch(benchmark::State& st)
{
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  const Matrix V = f.states.leftCols(16);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        Parallel ? kernels::surrogate_batch(f.model, V, f.model.box())
                 : kernels::surrogate_batch_serial(f.model, V, f.model.box()));
}

#define NLRM_PAIR(fn)                                                          \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime(); \
  BENCHMARK(fn<true>)->Name(#fn "/openmp")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime()

NLRM_PAIR(BM_SolveStates);
NLRM_PAIR(BM_ColumnNorms);
NLRM_PAIR(BM_Deflate);
NLRM_PAIR(BM_ReconstructBatch);
NLRM_PAIR(BM_SurrogateBatch);

} // namespace

BENCHMARK_MAIN();
