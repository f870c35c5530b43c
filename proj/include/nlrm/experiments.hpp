/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_EXPERIMENTS_HPP
#define NLRM_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlrm/family.hpp"
#include "nlrm/io.hpp"

namespace nlrm::experiments
{

enum class Scale
{
  desk,
  paper,
};

Scale scale_from_string(std::string_view s);

// ---------------------------------------------------------------- Test 1

/// Two mirrored four-subdomain diffusion models, random local averages.
struct Test1Config
{
  int n_per_side = 32;
  int n_train = 500;
  int n_test = 200;
  int m = 8;
  double box_width_h = 2.0; // measurement box width in mesh cells
  double abar = 1.0;
  double c = 0.9;
  std::uint64_t seed = 0;
};

Test1Config test1_defaults(Scale scale);
/// Keys present in `overrides` replace the defaults.
Test1Config test1_config(Scale scale, const io::json& overrides);
/// Everything but the seed (the seed is reported separately).
io::json to_json(const Test1Config& cfg);

struct Test1Curve
{
  std::string space; // "affine", "model1", "model2"
  std::vector<double> eps, mu;
  int n_star = 0;
};

struct Test1Draw
{
  std::array<double, 2> S{};   // surrogate of model k
  std::array<double, 2> err{}; // ||u - u*_k||
  double err_affine = 0.0;
  int k_surrogate = 0; // 0-based
  int k_oracle = 0;
};

struct Test1Result
{
  Test1Config config;
  std::string hash;
  std::array<Test1Curve, 3> curves;
  std::array<std::vector<Test1Draw>, 2> draws; // per test set
  double seconds = 0.0;

  /// Share of test set t (0-based) whose selected model is t.
  double surrogate_success(int t) const;
  double oracle_success(int t) const;
  /// method: 0 affine, 1 nonlinear with oracle, 2 nonlinear with surrogate
  double avg_error(int t, int method) const;
  double max_error(int t, int method) const;
};

Test1Result run_test1(const Test1Config& cfg);

/// test1_selection.csv, test1_errors.csv, test1_mu_eps.csv, test1_draws.csv
/// and test1_meta.json.
void write_test1(const Test1Result& res, const std::filesystem::path& dir);

// ---------------------------------------------------------------- Test 2

enum class CMode
{
  c09_inv_l,   // 0.9 / l
  c099_inv_l,  // 0.99 / l
  c09_inv_l2,  // 0.9 / l^2
  c099_inv_l2, // 0.99 / l^2
};

std::string to_string(CMode c);
CMode cmode_from_string(std::string_view s);
Vector cmode_coefficients(CMode c, int d);

struct Test2Config
{
  int n_per_side = 32;
  int n_train = 500;
  int n_test = 200;
  int K_max = 64;
  double box_width_h = 2.0;
  double abar = 1.0;
  std::vector<int> ds{4, 16};
  std::vector<int> ms{4, 16};
  std::vector<CMode> c_modes{CMode::c09_inv_l, CMode::c099_inv_l,
                             CMode::c09_inv_l2, CMode::c099_inv_l2};
  SplitRule rule = SplitRule::tau_probe;
  std::uint64_t seed = 0;
};

Test2Config test2_defaults(Scale scale);
Test2Config test2_config(Scale scale, const io::json& overrides);
io::json to_json(const Test2Config& cfg);

struct Test2Combo
{
  int d = 4;
  int m = 4;
  CMode c_mode = CMode::c09_inv_l;
};

struct Test2Row
{
  int K = 1;
  double sigma_K = 0.0;
  // Over the test set; NaN when the combination was built without
  // evaluation. err_max / err_min envelope the oracle-selected error.
  double err_surrogate_avg = 0.0;
  double err_oracle_avg = 0.0;
  double err_max = 0.0;
  double err_min = 0.0;
};

struct Test2ComboResult
{
  Test2Combo combo;
  std::vector<Test2Row> rows; // K = 1..family size
  bool converged = false;
  int data_starved_cells = 0;
  double seconds = 0.0;
};

/// Builds the splitting family to K_max (no admissibility target) and, if
/// `evaluate`, scores surrogate and oracle selection at every K.
Test2ComboResult run_test2_combo(const Test2Config& cfg, const Test2Combo& combo,
                                 bool evaluate = true);

struct Test2Result
{
  Test2Config config;
  std::string hash;
  std::vector<Test2ComboResult> combos;
};

Test2Result run_test2(const Test2Config& cfg);

/// test2.csv (config_hash, seed, d, m, c_mode, K, sigma_K,
/// err_surrogate_avg, err_oracle_avg, err_max, err_min) and test2_meta.json.
void write_test2(const Test2Result& res, const std::filesystem::path& dir);

/// "%.10e" formatting shared by every CSV writer.
std::string fmt(double x);

} // namespace nlrm::experiments

#endif
