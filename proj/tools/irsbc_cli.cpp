// SPDX-License-Identifier: Apache-2.0
//
// irsbc: transmit power minimization for IRS-aided backscatter links
// Copyright (C) 2026 The irsbc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line driver for the sweeps. Command-line options override the
// config file, which overrides the built-in defaults.

#include "irsbc/irsbc.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"irsbc: minimum transmit power sweeps for IRS-aided backscatter links"};

  std::string experiment = "fig2";
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::string out_dir;
  std::string schemes;
  std::string regime;
  unsigned threads = 0;
  bool timing = false;

  app.add_option("--experiment", experiment, "Experiment to run")
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "single"}));
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--realizations", realizations, "Channel realizations per point")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--schemes", schemes, "Comma-separated schemes (mm_sdr,no_irs,random_phases,align_cit,align_tir,"
                                       "grid_oracle,monostatic)");
  app.add_option("--regime", regime, "Phase solver regime for xi > 0")
      ->check(CLI::IsMember({"auto", "dinkelbach", "circuit", "noise"}));
  app.add_option("--threads", threads, "Worker threads (default: config value)");
  app.add_flag("--record-timing", timing, "Write measured wall_ms into results.csv (breaks byte determinism)");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto kind = irsbc::parse_experiment(experiment);
    irsbc::ExperimentConfig cfg =
        config_path.empty() ? irsbc::ExperimentConfig::defaults(kind) : irsbc::load_config(config_path, kind);
    if (!config_path.empty() && app.count("--experiment") && cfg.experiment != kind) {
      std::cerr << "error: --experiment " << experiment << " conflicts with the config file ("
                << irsbc::to_string(cfg.experiment) << ")\n";
      return 2;
    }
    if (seed) cfg.seed = *seed;
    if (realizations) cfg.realizations = *realizations;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!schemes.empty()) cfg.schemes = irsbc::parse_scheme_list(schemes);
    if (!regime.empty()) cfg.regime = irsbc::parse_regime(regime);
    if (threads > 0) cfg.threads = threads;
    if (timing) cfg.record_timing = true;

    const auto t0 = std::chrono::steady_clock::now();
    const irsbc::SweepResult res = irsbc::run_experiment(cfg);
    irsbc::emit_outputs(res, cfg.output_dir, cfg.record_timing);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t infeasible = 0;
    for (const auto& r : res.rows) infeasible += r.feasible ? 0 : 1;
    std::cout << irsbc::to_string(cfg.experiment) << ": " << res.point_labels.size() << " points, "
              << cfg.schemes.size() << " schemes, " << cfg.realizations << " realizations, " << res.rows.size()
              << " rows (" << infeasible << " infeasible) in " << secs << " s -> " << cfg.output_dir << '\n';
    for (const auto& s : irsbc::summarize(res))
      std::cout << "  " << res.sweep_var_name << '=' << s.sweep_value << "  " << irsbc::to_string(s.scheme)
                << "  mean " << s.mean_dbm << " dBm  std " << s.std_dbm << " dB\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
