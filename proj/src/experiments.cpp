/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "nlrm/estimation.hpp"
#include "nlrm/kernels.hpp"
#include "nlrm/rng.hpp"

namespace nlrm::experiments
{

namespace fs = std::filesystem;
using io::json;

namespace
{

// Sub-stream tags for derive_seed.
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;
constexpr std::uint64_t kSensorStream = 3;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double elapsed(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <class T>
void take(const json& j, const char* key, T& field)
{
  if (j.contains(key))
    field = j.at(key).get<T>();
}

std::ofstream open_csv(const fs::path& path, const char* header)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot write " + path.string());
  os << header << '\n';
  return os;
}

std::shared_ptr<const DiscreteSpace> make_space(int n_per_side)
{
  return std::make_shared<const DiscreteSpace>(Grid(n_per_side));
}

} // namespace

std::string fmt(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

Scale scale_from_string(std::string_view s)
{
  if (s == "desk")
    return Scale::desk;
  if (s == "paper")
    return Scale::paper;
  throw std::invalid_argument("scale must be desk or paper");
}

// ---------------------------------------------------------------- Test 1

Test1Config test1_defaults(Scale scale)
{
  Test1Config cfg;
  if (scale == Scale::paper)
  {
    cfg.n_per_side = 128;
    cfg.n_train = 5000;
    cfg.n_test = 2000;
  }
  return cfg;
}

Test1Config test1_config(Scale scale, const json& o)
{
  Test1Config cfg = test1_defaults(scale);
  take(o, "n_per_side", cfg.n_per_side);
  take(o, "n_train", cfg.n_train);
  take(o, "n_test", cfg.n_test);
  take(o, "m", cfg.m);
  take(o, "box_width_h", cfg.box_width_h);
  take(o, "abar", cfg.abar);
  take(o, "c", cfg.c);
  take(o, "seed", cfg.seed);
  return cfg;
}

json to_json(const Test1Config& cfg)
{
  return {{"experiment", "test1"},
          {"n_per_side", cfg.n_per_side},
          {"n_train", cfg.n_train},
          {"n_test", cfg.n_test},
          {"m", cfg.m},
          {"box_width_h", cfg.box_width_h},
          {"abar", cfg.abar},
          {"c", cfg.c}};
}

double Test1Result::surrogate_success(int t) const
{
  int hits = 0;
  for (const Test1Draw& d : draws[t])
    hits += d.k_surrogate == t;
  return draws[t].empty() ? 0.0 : double(hits) / draws[t].size();
}

double Test1Result::oracle_success(int t) const
{
  int hits = 0;
  for (const Test1Draw& d : draws[t])
    hits += d.k_oracle == t;
  return draws[t].empty() ? 0.0 : double(hits) / draws[t].size();
}

namespace
{

double method_error(const Test1Draw& d, int method)
{
  switch (method)
  {
  case 0:
    return d.err_affine;
  case 1:
    return d.err[d.k_oracle];
  default:
    return d.err[d.k_surrogate];
  }
}

} // namespace

double Test1Result::avg_error(int t, int method) const
{
  double s = 0.0;
  for (const Test1Draw& d : draws[t])
    s += method_error(d, method);
  return draws[t].empty() ? 0.0 : s / draws[t].size();
}

double Test1Result::max_error(int t, int method) const
{
  double s = 0.0;
  for (const Test1Draw& d : draws[t])
    s = std::max(s, method_error(d, method));
  return s;
}

Test1Result run_test1(const Test1Config& cfg)
{
  const auto t0 = std::chrono::steady_clock::now();
  Test1Result res;
  res.config = cfg;
  res.hash = io::config_hash(to_json(cfg));

  auto space = make_space(cfg.n_per_side);
  const Vector c = Vector::Constant(4, cfg.c);
  const std::array<AffineModel, 2> models{
      build_model(space, Partition::test1_partition1, cfg.abar, c),
      build_model(space, Partition::test1_partition2, cfg.abar, c)};

  const MeasurementSpace W = build_measurements(
      space, Placement::random, cfg.m, cfg.box_width_h * space->grid().h(),
      derive_seed(cfg.seed, kSensorStream));

  const std::uint64_t train_seed = derive_seed(cfg.seed, kTrainStream);
  const std::uint64_t test_seed = derive_seed(cfg.seed, kTestStream);
  std::array<SnapshotSet, 2> train{
      sample_snapshots(models[0], cfg.n_train, train_seed),
      sample_snapshots(models[1], cfg.n_train, train_seed)};
  std::array<SnapshotSet, 2> test{
      sample_snapshots(models[0], cfg.n_test, test_seed),
      sample_snapshots(models[1], cfg.n_test, test_seed)};

  // a_1(0) = a_2(0), so both models share the offset.
  const StateVector offset = solve_state(models[0], Vector::Zero(4));
  Matrix both(offset.size(), 2 * cfg.n_train);
  both << train[0].states, train[1].states;

  std::array<RBHierarchy, 3> h{
      greedy_hierarchy(*space, both, offset, cfg.m),
      greedy_hierarchy(*space, train[0].states, offset, cfg.m),
      greedy_hierarchy(*space, train[1].states, offset, cfg.m)};
  const char* names[3] = {"affine", "model1", "model2"};
  std::array<AffineReducedSpace, 3> spaces;
  for (int s = 0; s < 3; ++s)
  {
    attach_stability(h[s], W);
    const DimensionChoice ch =
        best_dimension(h[s], DimensionCriterion::product(), 1);
    spaces[s] = h[s].space(ch.n);
    res.curves[s] = {names[s], h[s].eps, h[s].mu, ch.n};
  }

  const std::array<Candidate, 2> cands{
      Candidate{&models[0], spaces[1], models[0].box()},
      Candidate{&models[1], spaces[2], models[1].box()}};

  for (int t = 0; t < 2; ++t)
  {
    auto& draws = res.draws[t];
    draws.resize(cfg.n_test);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.n_test; ++i)
    {
      try
      {
        const StateVector u = test[t].states.col(i);
        const Observation obs = project_W(W, u);
        Test1Draw& d = draws[i];
        d.err_affine = space->norm(u - reconstruct(spaces[0], W, obs).u_star);
        const SelectionResult sel = select_state(cands, W, obs);
        for (int k = 0; k < 2; ++k)
        {
          d.S[k] = sel.cells[k].S;
          d.err[k] = sel.cells[k].ok ? space->norm(u - sel.cells[k].u_star)
                                     : kInfiniteMu;
        }
        d.k_surrogate = sel.k_star;
        d.k_oracle = oracle_select(sel, *space, u);
      }
      catch (...)
      {
#pragma omp critical(nlrm_test1_error)
        if (!error)
          error = std::current_exception();
      }
    }
    if (error)
      std::rethrow_exception(error);
  }
  res.seconds = elapsed(t0);
  return res;
}

void write_test1(const Test1Result& res, const fs::path& dir)
{
  fs::create_directories(dir);
  const std::string pre =
      res.hash + "," + std::to_string(res.config.seed) + ",";

  auto sel = open_csv(dir / "test1_selection.csv",
                      "config_hash,seed,test_set,method,selected_model,count,"
                      "total,success_rate");
  for (int t = 0; t < 2; ++t)
    for (int method = 0; method < 2; ++method)
    {
      std::array<int, 2> count{0, 0};
      for (const Test1Draw& d : res.draws[t])
        ++count[method == 0 ? d.k_surrogate : d.k_oracle];
      const double rate =
          method == 0 ? res.surrogate_success(t) : res.oracle_success(t);
      for (int k = 0; k < 2; ++k)
        sel << pre << t + 1 << ',' << (method == 0 ? "surrogate" : "oracle")
            << ',' << k + 1 << ',' << count[k] << ',' << res.draws[t].size()
            << ',' << fmt(rate) << '\n';
    }

  auto err = open_csv(dir / "test1_errors.csv",
                      "config_hash,seed,test_set,method,avg_error,max_error");
  const char* methods[3] = {"affine", "nonlinear_oracle",
                            "nonlinear_surrogate"};
  for (int t = 0; t < 2; ++t)
    for (int method = 0; method < 3; ++method)
      err << pre << t + 1 << ',' << methods[method] << ','
          << fmt(res.avg_error(t, method)) << ','
          << fmt(res.max_error(t, method)) << '\n';

  auto curves = open_csv(dir / "test1_mu_eps.csv",
                         "config_hash,seed,space,n,mu,eps,mu_eps,chosen");
  for (const Test1Curve& c : res.curves)
    for (std::size_t n = 0; n < c.eps.size(); ++n)
    {
      const double mu = n < c.mu.size() ? c.mu[n] : kInfiniteMu;
      curves << pre << c.space << ',' << n << ',' << fmt(mu) << ','
             << fmt(c.eps[n]) << ',' << fmt(mu * c.eps[n]) << ','
             << (static_cast<int>(n) == c.n_star ? 1 : 0) << '\n';
    }

  auto draws = open_csv(dir / "test1_draws.csv",
                        "config_hash,seed,test_set,index,S_1,S_2,err_1,err_2,"
                        "err_affine,k_surrogate,k_oracle");
  for (int t = 0; t < 2; ++t)
    for (std::size_t i = 0; i < res.draws[t].size(); ++i)
    {
      const Test1Draw& d = res.draws[t][i];
      draws << pre << t + 1 << ',' << i << ',' << fmt(d.S[0]) << ','
            << fmt(d.S[1]) << ',' << fmt(d.err[0]) << ',' << fmt(d.err[1])
            << ',' << fmt(d.err_affine) << ',' << d.k_surrogate + 1 << ','
            << d.k_oracle + 1 << '\n';
    }

  json meta = {{"config", to_json(res.config)},
               {"config_hash", res.hash},
               {"seed", res.config.seed},
               {"rng", Rng::name},
               {"threads", kernels::max_threads()},
               {"seconds", res.seconds},
               {"n_star",
                {{"affine", res.curves[0].n_star},
                 {"model1", res.curves[1].n_star},
                 {"model2", res.curves[2].n_star}}}};
  for (int t = 0; t < 2; ++t)
    meta["test_set_" + std::to_string(t + 1)] = {
        {"surrogate_success", res.surrogate_success(t)},
        {"oracle_success", res.oracle_success(t)},
        {"avg_error_affine", res.avg_error(t, 0)},
        {"avg_error_oracle", res.avg_error(t, 1)},
        {"avg_error_surrogate", res.avg_error(t, 2)}};
  io::write_json(dir / "test1_meta.json", meta);
}

// ---------------------------------------------------------------- Test 2

std::string to_string(CMode c)
{
  switch (c)
  {
  case CMode::c09_inv_l:
    return "0.9/l";
  case CMode::c099_inv_l:
    return "0.99/l";
  case CMode::c09_inv_l2:
    return "0.9/l^2";
  case CMode::c099_inv_l2:
    return "0.99/l^2";
  }
  return "?";
}

CMode cmode_from_string(std::string_view s)
{
  for (CMode c : {CMode::c09_inv_l, CMode::c099_inv_l, CMode::c09_inv_l2,
                  CMode::c099_inv_l2})
    if (to_string(c) == s)
      return c;
  throw std::invalid_argument("unknown c_mode: " + std::string(s));
}

Vector cmode_coefficients(CMode c, int d)
{
  const double scale =
      (c == CMode::c09_inv_l || c == CMode::c09_inv_l2) ? 0.9 : 0.99;
  const int power = (c == CMode::c09_inv_l || c == CMode::c099_inv_l) ? 1 : 2;
  Vector out(d);
  for (int l = 1; l <= d; ++l)
    out[l - 1] = scale / std::pow(double(l), power);
  return out;
}

Test2Config test2_defaults(Scale scale)
{
  Test2Config cfg;
  if (scale == Scale::paper)
  {
    cfg.n_per_side = 128;
    cfg.n_train = 5000;
    cfg.n_test = 1000;
  }
  return cfg;
}

Test2Config test2_config(Scale scale, const json& o)
{
  Test2Config cfg = test2_defaults(scale);
  take(o, "n_per_side", cfg.n_per_side);
  take(o, "n_train", cfg.n_train);
  take(o, "n_test", cfg.n_test);
  take(o, "K_max", cfg.K_max);
  take(o, "box_width_h", cfg.box_width_h);
  take(o, "abar", cfg.abar);
  take(o, "ds", cfg.ds);
  take(o, "ms", cfg.ms);
  take(o, "seed", cfg.seed);
  if (o.contains("c_modes"))
  {
    cfg.c_modes.clear();
    for (const json& s : o["c_modes"])
      cfg.c_modes.push_back(cmode_from_string(s.get<std::string>()));
  }
  if (o.contains("rule"))
    cfg.rule = split_rule_from_string(o["rule"].get<std::string>());
  return cfg;
}

json to_json(const Test2Config& cfg)
{
  json modes = json::array();
  for (CMode c : cfg.c_modes)
    modes.push_back(to_string(c));
  return {{"experiment", "test2"},
          {"n_per_side", cfg.n_per_side},
          {"n_train", cfg.n_train},
          {"n_test", cfg.n_test},
          {"K_max", cfg.K_max},
          {"box_width_h", cfg.box_width_h},
          {"abar", cfg.abar},
          {"ds", cfg.ds},
          {"ms", cfg.ms},
          {"c_modes", modes},
          {"rule", to_string(cfg.rule)}};
}

Test2ComboResult run_test2_combo(const Test2Config& cfg, const Test2Combo& combo,
                                 bool evaluate)
{
  const auto t0 = std::chrono::steady_clock::now();
  Partition part;
  if (combo.d == 4)
    part = Partition::grid2x2;
  else if (combo.d == 16)
    part = Partition::grid4x4;
  else
    throw std::invalid_argument("test2: d must be 4 or 16");

  auto space = make_space(cfg.n_per_side);
  const AffineModel model =
      build_model(space, part, cfg.abar, cmode_coefficients(combo.c_mode, combo.d));
  const MeasurementSpace W =
      build_measurements(space, Placement::evenly_spaced, combo.m,
                         cfg.box_width_h * space->grid().h());
  const SnapshotSet train =
      sample_snapshots(model, cfg.n_train, derive_seed(cfg.seed, kTrainStream));

  FamilyOptions opt;
  opt.mode = FamilyMode::make_sigma(0.0);
  opt.K_max = cfg.K_max;
  opt.rule = cfg.rule;
  const ReducedFamily fam = build_family(model, train, W, opt);

  Test2ComboResult out;
  out.combo = combo;
  out.converged = fam.converged();
  for (int id : fam.leaves())
    out.data_starved_cells += fam.cell(id).data_starved;

  const int n_cells = static_cast<int>(fam.pool().size());
  Matrix S, E;
  if (evaluate)
  {
    const SnapshotSet test =
        sample_snapshots(model, cfg.n_test, derive_seed(cfg.seed, kTestStream));
    S.setConstant(cfg.n_test, n_cells, kInfiniteMu);
    E.setConstant(cfg.n_test, n_cells, kInfiniteMu);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.n_test; ++i)
    {
      try
      {
        const StateVector u = test.states.col(i);
        const Observation obs = project_W(W, u);
        for (int id = 0; id < n_cells; ++id)
        {
          const Cell& c = fam.cell(id);
          const CellEstimate e = estimate_cell({&model, c.space, c.box}, W, obs);
          if (!e.ok)
            continue;
          S(i, id) = e.S;
          E(i, id) = space->norm(u - e.u_star);
        }
      }
      catch (...)
      {
#pragma omp critical(nlrm_test2_error)
        if (!error)
          error = std::current_exception();
      }
    }
    if (error)
      std::rethrow_exception(error);
  }

  for (int K = 1; K <= fam.size(); ++K)
  {
    Test2Row row{K, fam.sigma_at(K), kNaN, kNaN, kNaN, kNaN};
    if (evaluate)
    {
      const std::vector<int> leaves = fam.cells_at(K);
      double sum_sur = 0.0, sum_or = 0.0;
      double emax = 0.0, emin = kInfiniteMu;
      for (int i = 0; i < cfg.n_test; ++i)
      {
        int ks = leaves.front();
        double eo = kInfiniteMu;
        for (int id : leaves)
        {
          if (S(i, id) < S(i, ks))
            ks = id;
          eo = std::min(eo, E(i, id));
        }
        sum_sur += E(i, ks);
        sum_or += eo;
        emax = std::max(emax, eo);
        emin = std::min(emin, eo);
      }
      row.err_surrogate_avg = sum_sur / cfg.n_test;
      row.err_oracle_avg = sum_or / cfg.n_test;
      row.err_max = emax;
      row.err_min = emin;
    }
    out.rows.push_back(row);
  }
  out.seconds = elapsed(t0);
  return out;
}

Test2Result run_test2(const Test2Config& cfg)
{
  Test2Result res;
  res.config = cfg;
  res.hash = io::config_hash(to_json(cfg));
  for (int d : cfg.ds)
    for (int m : cfg.ms)
      for (CMode c : cfg.c_modes)
        res.combos.push_back(run_test2_combo(cfg, {d, m, c}));
  return res;
}

void write_test2(const Test2Result& res, const fs::path& dir)
{
  fs::create_directories(dir);
  auto csv = open_csv(dir / "test2.csv",
                      "config_hash,seed,d,m,c_mode,K,sigma_K,err_surrogate_avg,"
                      "err_oracle_avg,err_max,err_min");
  json combos = json::array();
  for (const Test2ComboResult& c : res.combos)
  {
    for (const Test2Row& r : c.rows)
      csv << res.hash << ',' << res.config.seed << ',' << c.combo.d << ','
          << c.combo.m << ',' << to_string(c.combo.c_mode) << ',' << r.K << ','
          << fmt(r.sigma_K) << ',' << fmt(r.err_surrogate_avg) << ','
          << fmt(r.err_oracle_avg) << ',' << fmt(r.err_max) << ','
          << fmt(r.err_min) << '\n';
    combos.push_back({{"d", c.combo.d},
                      {"m", c.combo.m},
                      {"c_mode", to_string(c.combo.c_mode)},
                      {"K", c.rows.size()},
                      {"converged", c.converged},
                      {"data_starved_cells", c.data_starved_cells},
                      {"seconds", c.seconds}});
  }
  io::write_json(dir / "test2_meta.json",
                 {{"config", to_json(res.config)},
                  {"config_hash", res.hash},
                  {"seed", res.config.seed},
                  {"rng", Rng::name},
                  {"threads", kernels::max_threads()},
                  {"combinations", combos}});
}

} // namespace nlrm::experiments
