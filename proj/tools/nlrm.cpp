/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "nlrm/altmin.hpp"
#include "nlrm/estimation.hpp"
#include "nlrm/experiments.hpp"
#include "nlrm/io.hpp"
#include "nlrm/kernels.hpp"
#include "nlrm/rng.hpp"

namespace fs = std::filesystem;
using nlrm::io::json;
namespace ex = nlrm::experiments;

namespace
{

struct Common
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string scale = "desk";
  std::string out = ".";
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c)
{
  cmd->add_option("--config", c.config, "JSON configuration file");
  cmd->add_option("--seed", c.seed, "Base random seed");
  cmd->add_option("--scale", c.scale, "Default sizes")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--threads", c.threads, "OpenMP threads (0: runtime default)");
}

json load_config(const Common& c)
{
  json cfg = c.config.empty() ? json::object() : nlrm::io::read_json(c.config);
  if (c.seed)
    cfg["seed"] = *c.seed;
  return cfg;
}

nlrm::Vector parse_list(const std::string& s)
{
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    v.push_back(std::stod(item));
  return Eigen::Map<const nlrm::Vector>(v.data(), static_cast<long>(v.size()));
}

int cmd_test1(const Common& c)
{
  const ex::Test1Config cfg =
      ex::test1_config(ex::scale_from_string(c.scale), load_config(c));
  const ex::Test1Result res = ex::run_test1(cfg);
  ex::write_test1(res, c.out);
  for (int t = 0; t < 2; ++t)
    std::cout << "test set " << t + 1 << ": surrogate "
              << 100 * res.surrogate_success(t) << "%, oracle "
              << 100 * res.oracle_success(t) << "%, avg error affine "
              << res.avg_error(t, 0) << " oracle " << res.avg_error(t, 1)
              << " surrogate " << res.avg_error(t, 2) << '\n';
  return 0;
}

int cmd_test2(const Common& c)
{
  const ex::Test2Config cfg =
      ex::test2_config(ex::scale_from_string(c.scale), load_config(c));
  const ex::Test2Result res = ex::run_test2(cfg);
  ex::write_test2(res, c.out);
  for (const auto& combo : res.combos)
    std::cout << "d=" << combo.combo.d << " m=" << combo.combo.m
              << " c=" << ex::to_string(combo.combo.c_mode)
              << " K=" << combo.rows.size()
              << " sigma_K=" << combo.rows.back().sigma_K
              << " oracle avg=" << combo.rows.back().err_oracle_avg << '\n';
  return 0;
}

// train config: {seed, n_train, model:{n_per_side, partition, abar, c},
//   measurements:{placement, m, box_width_h}, family:{mode, K_max, rule,
//   min_samples, n_min}}
int cmd_train(const Common& c)
{
  const json cfg = load_config(c);
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  const ex::Scale scale = ex::scale_from_string(c.scale);

  json mspec = cfg.value("model", json::object());
  mspec["version"] = nlrm::io::kFormatVersion;
  if (!mspec.contains("n_per_side"))
    mspec["n_per_side"] = scale == ex::Scale::desk ? 32 : 128;
  if (!mspec.contains("partition"))
    mspec["partition"] = "grid2x2";
  if (!mspec.contains("abar"))
    mspec["abar"] = 1.0;
  if (!mspec.contains("c"))
    mspec["c"] = std::vector<double>(4, 0.9);
  const nlrm::AffineModel model = nlrm::io::model_from_json(mspec);

  const json ms = cfg.value("measurements", json::object());
  const auto space = model.space_ptr();
  const nlrm::MeasurementSpace W = nlrm::build_measurements(
      space,
      nlrm::placement_from_string(ms.value("placement", std::string("random"))),
      ms.value("m", 8), ms.value("box_width_h", 2.0) * space->grid().h(),
      ms.value("seed", nlrm::derive_seed(seed, 3)));

  const json fs_cfg = cfg.value("family", json::object());
  nlrm::FamilyOptions opt;
  opt.mode = nlrm::io::mode_from_json(
      fs_cfg.value("mode", json{{"kind", "sigma"}, {"sigma", 0.0}}));
  opt.K_max = fs_cfg.value("K_max", 64);
  opt.rule = nlrm::split_rule_from_string(
      fs_cfg.value("rule", std::string("tau_probe")));
  opt.min_samples = fs_cfg.value("min_samples", 5);
  opt.n_min = fs_cfg.value("n_min", 0);

  const int n_train =
      cfg.value("n_train", scale == ex::Scale::desk ? 500 : 5000);
  const auto t0 = std::chrono::steady_clock::now();
  const nlrm::SnapshotSet train =
      nlrm::sample_snapshots(model, n_train, nlrm::derive_seed(seed, 1));
  const nlrm::ReducedFamily fam = nlrm::build_family(model, train, W, opt);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const fs::path out(c.out);
  fs::create_directories(out);
  nlrm::io::write_json(out / "model.json", nlrm::io::model_to_json(model));
  nlrm::io::write_json(out / "measurements.json",
                       nlrm::io::layout_to_json(W.layout()));
  nlrm::io::save_family(out / "family", fam);
  nlrm::io::write_json(out / "train_meta.json",
                       {{"config", cfg},
                        {"config_hash", nlrm::io::config_hash(cfg)},
                        {"seed", seed},
                        {"K", fam.size()},
                        {"sigma", fam.sigma()},
                        {"converged", fam.converged()},
                        {"seconds", secs}});
  std::cout << "K=" << fam.size() << " sigma=" << fam.sigma()
            << (fam.converged() ? "" : " (K_max reached, target not met)")
            << '\n';
  return 0;
}

struct EstimateArgs
{
  std::string model = "model.json";
  std::string measurements = "measurements.json";
  std::string family = "family";
  std::string obs;
  bool altmin = false;
  std::optional<double> noise;
  bool global_box = false;
};

int cmd_estimate(const Common& c, const EstimateArgs& a)
{
  const auto t0 = std::chrono::steady_clock::now();
  const nlrm::AffineModel model =
      nlrm::io::model_from_json(nlrm::io::read_json(a.model));
  const nlrm::MeasurementSpace W = nlrm::build_measurements(
      model.space_ptr(),
      nlrm::io::layout_from_json(nlrm::io::read_json(a.measurements)));
  const nlrm::ReducedFamily fam = nlrm::io::load_family(a.family);
  const nlrm::Observation obs =
      nlrm::io::observation_from_json(W, nlrm::io::read_json(a.obs));

  nlrm::SelectionResult sel = nlrm::select_state(fam, model, W, obs, a.global_box);
  const double R = nlrm::ellipticity_bounds(model).R;
  nlrm::plausible_set(sel, R);
  const double t_select =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json out = nlrm::io::selection_to_json(sel);
  out["R"] = R;
  out["sigma_K"] = fam.sigma();
  nlrm::StateVector u = sel.u_star;
  if (a.noise)
  {
    // ||eta||_2 <= sqrt(m) * level for entrywise-bounded noise.
    const double eps_noise =
        W.transform_norm() * std::sqrt(double(W.m())) * *a.noise;
    out["noise"] = {{"level", *a.noise},
                    {"eps_noise", eps_noise},
                    {"error_bound", fam.sigma() + eps_noise}};
  }
  if (a.altmin)
  {
    const nlrm::AltMinState st = nlrm::run_altmin(model, W, obs, sel);
    out["altmin"] = nlrm::io::altmin_trace_to_json(st);
    u = st.u;
  }
  out["timings"] = {
      {"select_seconds", t_select},
      {"total_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
           .count()}};
  out["u_star"] = nlrm::io::vector_to_json(u);

  fs::create_directories(c.out);
  nlrm::io::write_json(fs::path(c.out) / "estimate.json", out);
  std::cout << "k*=" << sel.k_star << " S=" << sel.cells[sel.k_star].S
            << " plausible=" << sel.plausible.size() << '\n';
  return 0;
}

int cmd_solve(const Common& c, const std::string& model_path,
              const std::string& y_list)
{
  const nlrm::AffineModel model =
      nlrm::io::model_from_json(nlrm::io::read_json(model_path));
  const nlrm::Vector y = parse_list(y_list);
  const nlrm::StateVector u = nlrm::solve_state(model, y);
  fs::create_directories(c.out);
  nlrm::io::write_state_dump(fs::path(c.out) / "state", u,
                             {{"y", nlrm::io::vector_to_json(y)},
                              {"norm_V", model.space().norm(u)}});
  std::cout << "||u||_V = " << model.space().norm(u) << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Nonlinear reduced-model state and parameter estimation"};
  app.require_subcommand(1);

  Common c1, c2, ct, ce, cs;
  auto* t1 = app.add_subcommand("test1", "Two-model selection experiment");
  add_common(t1, c1);
  auto* t2 = app.add_subcommand("test2", "Splitting-family sweep");
  add_common(t2, c2);
  auto* tr = app.add_subcommand("train", "Build and store a reduced family");
  add_common(tr, ct);

  EstimateArgs ea;
  auto* es = app.add_subcommand("estimate", "Estimate a state from data");
  add_common(es, ce);
  es->add_option("--model", ea.model, "Model JSON");
  es->add_option("--measurements", ea.measurements, "Measurement layout JSON");
  es->add_option("--family", ea.family, "Family file stem");
  es->add_option("--obs", ea.obs, "Observation JSON ({\"z\": [...]})")
      ->required();
  es->add_flag("--altmin", ea.altmin, "Refine with alternating minimization");
  es->add_option("--noise", ea.noise, "Measurement noise level (report bound)");
  es->add_flag("--global-box", ea.global_box,
               "Minimize surrogates over the whole parameter box");

  std::string model_path = "model.json", y_list;
  auto* so = app.add_subcommand("solve", "Solve the model at one parameter");
  add_common(so, cs);
  so->add_option("--model", model_path, "Model JSON");
  so->add_option("--y", y_list, "Comma-separated parameter")->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    for (Common* c : {&c1, &c2, &ct, &ce, &cs})
      nlrm::kernels::set_threads(c->threads);
    if (*t1)
      return cmd_test1(c1);
    if (*t2)
      return cmd_test2(c2);
    if (*tr)
      return cmd_train(ct);
    if (*es)
      return cmd_estimate(ce, ea);
    if (*so)
      return cmd_solve(cs, model_path, y_list);
  }
  catch (const std::exception& e)
  {
    std::cerr << "nlrm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
