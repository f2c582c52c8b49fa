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

// Seeded Monte-Carlo sweeps and their file outputs.
//
// Every (point, realization) pair draws its channels from
// derive_seed(master, experiment, point, realization), so points never share
// random state and the work can be spread over threads in any order.

#pragma once

#include "irsbc/benchmarks.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace irsbc {

enum class ExperimentKind { fig2, fig3, fig4, single };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fig2: return "fig2";
    case ExperimentKind::fig3: return "fig3";
    case ExperimentKind::fig4: return "fig4";
    case ExperimentKind::single: return "single";
  }
  return "unknown";
}

inline ExperimentKind parse_experiment(std::string_view s) {
  for (auto k : {ExperimentKind::fig2, ExperimentKind::fig3, ExperimentKind::fig4, ExperimentKind::single})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown experiment '" + std::string(s) + "'");
}

inline RegimeChoice parse_regime(std::string_view s) {
  if (s == "auto") return RegimeChoice::automatic;
  if (s == "dinkelbach") return RegimeChoice::dinkelbach;
  if (s == "circuit") return RegimeChoice::circuit;
  if (s == "noise") return RegimeChoice::noise;
  throw std::invalid_argument("unknown regime '" + std::string(s) + "'");
}

inline std::string to_string(RegimeChoice r) {
  switch (r) {
    case RegimeChoice::automatic: return "auto";
    case RegimeChoice::dinkelbach: return "dinkelbach";
    case RegimeChoice::circuit: return "circuit";
    case RegimeChoice::noise: return "noise";
  }
  return "auto";
}

inline std::vector<SchemeId> parse_scheme_list(std::string_view csv) {
  std::vector<SchemeId> out;
  std::string item;
  std::istringstream in{std::string(csv)};
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const auto s = parse_scheme(item);
    if (!s) throw std::invalid_argument("unknown scheme '" + item + "'");
    if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  }
  if (out.empty()) throw std::invalid_argument("scheme list is empty");
  return out;
}

/// "a:b:step" (inclusive range) or "x1, x2, ...".
inline std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  const std::string s(text);
  auto to_double = [](const std::string& t) {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (t.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("bad number '" + t + "'");
    return v;
  };
  if (s.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::istringstream in(s);
    std::string p;
    while (std::getline(in, p, ':')) parts.push_back(to_double(p));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
      throw std::invalid_argument("range must be start:stop:step with step > 0");
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  } else {
    std::istringstream in(s);
    std::string p;
    while (std::getline(in, p, ','))
      if (p.find_first_not_of(" \t") != std::string::npos) out.push_back(to_double(p));
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::fig2;
  SystemLayout layout;
  PathLossModel path_loss;
  TagParams tag;
  LinkTarget target;  // linear units; dB values are converted at load
  int realizations = 100;
  std::vector<SchemeId> schemes;
  MmConfig mm;
  RegimeChoice regime = RegimeChoice::automatic;
  RegimeThresholds thresholds;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  unsigned threads = 1;
  bool record_timing = false;  // write measured wall_ms into results.csv
  int grid_levels = 8;

  std::vector<double> tag_x;              // fig2
  std::vector<double> element_counts;     // fig3
  std::vector<double> distances;          // fig4 [m]
  std::vector<double> angles_deg;         // fig4

  static ExperimentConfig defaults(ExperimentKind kind) {
    ExperimentConfig c;
    c.experiment = kind;
    switch (kind) {
      case ExperimentKind::fig2:
        c.schemes = {SchemeId::mm_sdr, SchemeId::no_irs, SchemeId::random_phases, SchemeId::align_cit,
                     SchemeId::align_tir};
        c.tag_x = parse_number_list("5:95:5");
        break;
      case ExperimentKind::fig3:
        c.schemes = {SchemeId::mm_sdr, SchemeId::no_irs};
        c.layout.tag_position = {20.0, 0.0};
        c.element_counts = {16, 36, 49, 64, 100};
        break;
      case ExperimentKind::fig4:
        c.schemes = {SchemeId::monostatic, SchemeId::no_irs};
        c.layout.architecture = Architecture::monostatic;
        c.layout.ce_antennas = 1;
        c.layout.ce_position = {0.0, 0.0};
        c.layout.reader_position = {0.0, 0.0};
        c.layout.irs.center = {40.0, 0.0};
        c.layout.irs.orientation = {-1.0, 0.0};
        c.distances = parse_number_list("10:100:10");
        c.angles_deg = {0.0, 45.0, 90.0, 135.0, 180.0};
        break;
      case ExperimentKind::single:
        c.schemes = {SchemeId::mm_sdr, SchemeId::no_irs};
        c.layout.tag_position = {20.0, 0.0};
        break;
    }
    return c;
  }

  void validate() const {
    if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("no schemes selected");
    if (!(target.snr_threshold > 0.0) || !(target.noise_power > 0.0))
      throw std::invalid_argument("SNR threshold and noise power must be positive");
    if (grid_levels < 1) throw std::invalid_argument("grid levels must be positive");
    layout.validate();
    tag.validate();
    mm.validate();
    for (auto s : schemes) {
      if (s == SchemeId::monostatic && layout.architecture != Architecture::monostatic)
        throw std::invalid_argument("the monostatic scheme needs a monostatic layout");
      if (s == SchemeId::monostatic && tag.circuit_power != 0.0)
        throw std::invalid_argument("the monostatic scheme assumes a semipassive tag (xi = 0)");
    }
    switch (experiment) {
      case ExperimentKind::fig2:
        if (tag_x.empty()) throw std::invalid_argument("fig2 needs tag x positions");
        break;
      case ExperimentKind::fig3:
        if (element_counts.empty()) throw std::invalid_argument("fig3 needs element counts");
        for (double n : element_counts)
          if (n < 0 || n != std::floor(n)) throw std::invalid_argument("element counts must be whole numbers");
        break;
      case ExperimentKind::fig4:
        if (layout.architecture != Architecture::monostatic) throw std::invalid_argument("fig4 is monostatic");
        if (distances.empty() || angles_deg.empty()) throw std::invalid_argument("fig4 needs distances and angles");
        for (double d : distances)
          if (!(d > 0.0)) throw std::invalid_argument("fig4 distances must be positive");
        break;
      case ExperimentKind::single: break;
    }
  }
};

namespace detail {

// ptree's get(key, default) quietly returns the default when the value does
// not parse; a present-but-malformed key must be an error instead.
template <class T>
std::optional<T> read_optional(const boost::property_tree::ptree& pt, const std::string& key) {
  if (!pt.get_child_optional(key)) return std::nullopt;
  return pt.get<T>(key);
}

template <class T>
T read(const boost::property_tree::ptree& pt, const std::string& key, T fallback) {
  return read_optional<T>(pt, key).value_or(fallback);
}

inline Position2D read_position(const boost::property_tree::ptree& pt, const std::string& key, Position2D fallback) {
  return {read<double>(pt, key + "_x", fallback.x), read<double>(pt, key + "_y", fallback.y)};
}

inline bool read_bool(const boost::property_tree::ptree& pt, const std::string& key, bool fallback) {
  const auto v = pt.get_optional<std::string>(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw std::invalid_argument("bad boolean for " + key + ": '" + *v + "'");
}

}  // namespace detail

/// Loads an INI file. Keys absent from the file keep the defaults of the
/// selected experiment (or of `base_kind` when no name is given). dB and dBm
/// entries are converted to linear units here and nowhere else.
inline ExperimentConfig load_config(const std::filesystem::path& path,
                                    std::optional<ExperimentKind> base_kind = std::nullopt) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::runtime_error("cannot read config " + path.string() + ": " + e.message());
  }
  try {
    const auto name = tree.get_optional<std::string>("experiment.name");
    const ExperimentKind kind = name ? parse_experiment(*name) : base_kind.value_or(ExperimentKind::fig2);
    ExperimentConfig c = ExperimentConfig::defaults(kind);

    c.seed = detail::read<std::uint64_t>(tree, "experiment.seed", c.seed);
    c.realizations = detail::read<int>(tree, "experiment.realizations", c.realizations);
    if (auto s = tree.get_optional<std::string>("experiment.schemes")) c.schemes = parse_scheme_list(*s);
    if (auto s = tree.get_optional<std::string>("experiment.regime")) c.regime = parse_regime(*s);
    c.threads = detail::read<unsigned>(tree, "experiment.threads", c.threads);

    auto& lay = c.layout;
    if (auto a = tree.get_optional<std::string>("layout.architecture")) {
      if (*a == "bistatic") lay.architecture = Architecture::bistatic;
      else if (*a == "monostatic") lay.architecture = Architecture::monostatic;
      else throw std::invalid_argument("unknown architecture '" + *a + "'");
    }
    lay.ce_position = detail::read_position(tree, "layout.ce", lay.ce_position);
    lay.reader_position = detail::read_position(tree, "layout.reader", lay.reader_position);
    lay.tag_position = detail::read_position(tree, "layout.tag", lay.tag_position);
    lay.irs.center = detail::read_position(tree, "layout.irs", lay.irs.center);
    lay.irs.orientation = detail::read_position(tree, "layout.irs_normal", lay.irs.orientation);
    lay.irs.element_count = detail::read<int>(tree, "layout.elements", lay.irs.element_count);
    lay.irs.element_width = detail::read<double>(tree, "layout.element_width", lay.irs.element_width);
    if (auto f = detail::read_optional<double>(tree, "layout.frequency_hz")) {
      if (!(*f > 0.0)) throw std::invalid_argument("frequency must be positive");
      lay.wavelength = kSpeedOfLight / *f;
    }
    lay.ce_antennas = detail::read<int>(tree, "layout.ce_antennas", lay.ce_antennas);
    c.path_loss.exponent = detail::read<double>(tree, "layout.path_loss_exponent", c.path_loss.exponent);

    c.tag.reflection_magnitude = detail::read<double>(tree, "tag.reflection_magnitude", c.tag.reflection_magnitude);
    c.tag.impedance_count = detail::read<int>(tree, "tag.impedance_count", c.tag.impedance_count);
    c.tag.harvest_efficiency = detail::read<double>(tree, "tag.harvest_efficiency", c.tag.harvest_efficiency);
    if (auto w = detail::read_optional<double>(tree, "tag.circuit_power_w")) c.tag.circuit_power = *w;
    if (auto dbm = detail::read_optional<double>(tree, "tag.circuit_power_dbm")) c.tag.circuit_power = dbm_to_watts(*dbm);

    if (auto db = detail::read_optional<double>(tree, "link.snr_threshold_db")) c.target.snr_threshold = db_to_linear(*db);
    if (auto dbm = detail::read_optional<double>(tree, "link.noise_power_dbm")) c.target.noise_power = dbm_to_watts(*dbm);

    if (auto s = tree.get_optional<std::string>("sweep.tag_x")) c.tag_x = parse_number_list(*s);
    if (auto s = tree.get_optional<std::string>("sweep.elements")) c.element_counts = parse_number_list(*s);
    if (auto s = tree.get_optional<std::string>("sweep.distances")) c.distances = parse_number_list(*s);
    if (auto s = tree.get_optional<std::string>("sweep.angles_deg")) c.angles_deg = parse_number_list(*s);
    c.grid_levels = detail::read<int>(tree, "sweep.grid_levels", c.grid_levels);

    if (auto m = tree.get_optional<std::string>("mm.curvature_mode")) {
      if (*m == "fixed") c.mm.curvature_mode = CurvatureMode::fixed;
      else if (*m == "adaptive") c.mm.curvature_mode = CurvatureMode::adaptive;
      else if (*m == "backtracking") c.mm.curvature_mode = CurvatureMode::backtracking;
      else throw std::invalid_argument("unknown curvature mode '" + *m + "'");
    }
    c.mm.fixed_curvature = detail::read<double>(tree, "mm.fixed_curvature", c.mm.fixed_curvature);
    c.mm.convergence_threshold = detail::read<double>(tree, "mm.convergence_threshold", c.mm.convergence_threshold);
    c.mm.max_outer_iterations = detail::read<int>(tree, "mm.max_iterations", c.mm.max_outer_iterations);
    c.mm.random_starts = detail::read<int>(tree, "mm.random_starts", c.mm.random_starts);
    c.mm.aligned_starts = detail::read_bool(tree, "mm.aligned_starts", c.mm.aligned_starts);
    c.mm.dinkelbach_max_iterations = detail::read<int>(tree, "mm.dinkelbach_max_iterations", c.mm.dinkelbach_max_iterations);
    c.mm.dinkelbach_tolerance = detail::read<double>(tree, "mm.dinkelbach_tolerance", c.mm.dinkelbach_tolerance);

    if (auto m = tree.get_optional<std::string>("sdp.method")) {
      if (*m == "low_rank") c.mm.sdp.method = SdpMethod::low_rank;
      else if (*m == "interior_point") c.mm.sdp.method = SdpMethod::interior_point;
      else throw std::invalid_argument("unknown SDP method '" + *m + "'");
    }
    c.mm.sdp.factor_rank = detail::read<int>(tree, "sdp.factor_rank", c.mm.sdp.factor_rank);
    c.mm.sdp.max_iterations = detail::read<int>(tree, "sdp.max_iterations", c.mm.sdp.max_iterations);
    c.mm.sdp.stationarity_tolerance = detail::read<double>(tree, "sdp.stationarity_tolerance", c.mm.sdp.stationarity_tolerance);
    c.mm.sdp.randomization_count = detail::read<int>(tree, "sdp.randomization_count", c.mm.sdp.randomization_count);

    c.thresholds.circuit_limited = detail::read<double>(tree, "regime.circuit_limited", c.thresholds.circuit_limited);
    c.thresholds.noise_limited = detail::read<double>(tree, "regime.noise_limited", c.thresholds.noise_limited);

    c.output_dir = detail::read<std::string>(tree, "output.dir", c.output_dir);
    c.record_timing = detail::read_bool(tree, "output.record_timing", c.record_timing);
    return c;
  } catch (const pt::ptree_bad_data& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
}

struct SweepRow {
  std::size_t point = 0;
  std::string sweep_value;  // formatted sweep coordinate
  SchemeId scheme = SchemeId::mm_sdr;
  int realization = 0;
  double p_star_dbm = std::numeric_limits<double>::quiet_NaN();  // NaN when infeasible
  bool feasible = false;
  int mm_iterations = 0;
  bool converged = true;
  double wall_ms = 0.0;
};

struct SweepResult {
  ExperimentKind experiment = ExperimentKind::fig2;
  std::string sweep_var_name;
  std::vector<std::string> point_labels;
  std::vector<SweepRow> rows;  // sorted by (point, scheme, realization)
};

/// Shortest round-trip decimal text for a double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

struct SchemeOutcome {
  double p_star = std::numeric_limits<double>::infinity();
  bool feasible = false;
  int mm_iterations = 0;
  bool converged = true;
};

/// Runs one scheme on one channel draw.
inline SchemeOutcome evaluate_scheme(const ChannelSet& ch, SchemeId scheme, const ExperimentConfig& cfg,
                                     std::uint64_t seed) {
  MmConfig mm = cfg.mm;
  mm.seed = derive_seed({seed, 0x11ULL});
  const auto cit_seed = derive_seed({mm.seed, 0xA11CULL});  // same as the MM start
  SchemeOutcome out;
  try {
    switch (scheme) {
      case SchemeId::mm_sdr: {
        const SolverSolution s = solve(ch, cfg.tag, cfg.target, mm, cfg.regime, cfg.thresholds);
        out.feasible = s.feasible;
        out.p_star = s.p_star;
        out.mm_iterations = s.diagnostics.iterations();
        out.converged = s.diagnostics.converged && !s.diagnostics.solver_failure;
        break;
      }
      case SchemeId::no_irs:
        out.p_star = no_irs_power(ch, cfg.tag, cfg.target);
        out.feasible = true;
        break;
      case SchemeId::random_phases:
        out.p_star = random_phase_power(ch, cfg.tag, cfg.target, derive_seed({seed, 0x22ULL}));
        out.feasible = true;
        break;
      case SchemeId::align_cit:
        out.p_star = p_star(ch, align_single_link(ch, AlignedLink::cit, mm.sdp, cit_seed), cfg.tag, cfg.target);
        out.feasible = true;
        break;
      case SchemeId::align_tir:
        out.p_star = p_star(ch, align_single_link(ch, AlignedLink::tir), cfg.tag, cfg.target);
        out.feasible = true;
        break;
      case SchemeId::grid_oracle: {
        const auto g = grid_search_oracle(ch, cfg.grid_levels);
        out.p_star = p_star(ch, g.phases, cfg.tag, cfg.target);
        out.feasible = true;
        break;
      }
      case SchemeId::monostatic: {
        const SolverSolution s = solve_monostatic(ch, cfg.tag, cfg.target);
        out.feasible = s.feasible;
        out.p_star = s.p_star;
        break;
      }
    }
  } catch (const std::domain_error&) {
    out = SchemeOutcome{};
  }
  if (!std::isfinite(out.p_star) || !(out.p_star > 0.0)) out.feasible = false;
  return out;
}

struct SweepPoint {
  std::string label;
  SystemLayout layout;
};

inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg, std::string& var_name) {
  std::vector<SweepPoint> pts;
  switch (cfg.experiment) {
    case ExperimentKind::fig2:
      var_name = "tag_x_m";
      for (double x : cfg.tag_x) {
        SweepPoint p{format_double(x), cfg.layout};
        p.layout.tag_position.x = x;
        pts.push_back(std::move(p));
      }
      break;
    case ExperimentKind::fig3:
      var_name = "irs_elements";
      for (double n : cfg.element_counts) {
        SweepPoint p{std::to_string(static_cast<int>(n)), cfg.layout};
        p.layout.irs.element_count = static_cast<int>(n);
        pts.push_back(std::move(p));
      }
      break;
    case ExperimentKind::fig4: {
      var_name = "distance_m:angle_deg";
      const Position2D r = cfg.layout.reader_position;
      const Position2D axis = cfg.layout.irs.center - r;
      const double base = std::atan2(axis.y, axis.x);
      for (double a : cfg.angles_deg)
        for (double d : cfg.distances) {
          SweepPoint p{format_double(d) + ":" + format_double(a), cfg.layout};
          const double phi = base + a * kPi / 180.0;
          p.layout.tag_position = {r.x + d * std::cos(phi), r.y + d * std::sin(phi)};
          pts.push_back(std::move(p));
        }
      break;
    }
    case ExperimentKind::single:
      var_name = "none";
      pts.push_back({"0", cfg.layout});
      break;
  }
  return pts;
}

/// Runs the configured sweep. Invalid configurations throw; per-draw
/// infeasibility is recorded in the rows.
inline SweepResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepResult res;
  res.experiment = cfg.experiment;
  const auto points = sweep_points(cfg, res.sweep_var_name);
  for (const auto& p : points) {
    p.layout.validate();
    if (std::find(cfg.schemes.begin(), cfg.schemes.end(), SchemeId::grid_oracle) != cfg.schemes.end() &&
        std::pow(cfg.grid_levels, p.layout.irs.element_count) > 1e7)
      throw std::invalid_argument("grid_oracle is limited to tiny surfaces (levels^N <= 1e7)");
    res.point_labels.push_back(p.label);
  }

  const std::size_t ns = cfg.schemes.size();
  const std::size_t nr = static_cast<std::size_t>(cfg.realizations);
  const std::size_t jobs = points.size() * nr;
  std::vector<SweepRow> rows(jobs * ns);
  const auto exp_id = static_cast<std::uint64_t>(cfg.experiment);

  parallel_for(
      jobs,
      [&](std::size_t job) {
        const std::size_t pi = job / nr;
        const std::size_t ri = job % nr;
        const std::uint64_t seed = derive_seed({cfg.seed, exp_id, pi, ri});
        const ChannelSet ch = synthesize_channels(points[pi].layout, cfg.path_loss, seed);
        for (std::size_t si = 0; si < ns; ++si) {
          const auto t0 = std::chrono::steady_clock::now();
          const SchemeOutcome o = evaluate_scheme(ch, cfg.schemes[si], cfg, seed);
          SweepRow& row = rows[(pi * ns + si) * nr + ri];
          row.point = pi;
          row.sweep_value = points[pi].label;
          row.scheme = cfg.schemes[si];
          row.realization = static_cast<int>(ri);
          row.feasible = o.feasible;
          row.p_star_dbm = o.feasible ? watts_to_dbm(o.p_star) : std::numeric_limits<double>::quiet_NaN();
          row.mm_iterations = o.mm_iterations;
          row.converged = o.converged;
          row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
      },
      cfg.threads);
  res.rows = std::move(rows);
  return res;
}

inline SweepResult run_fig2(ExperimentConfig cfg) {
  cfg.experiment = ExperimentKind::fig2;
  return run_experiment(cfg);
}
inline SweepResult run_fig3(ExperimentConfig cfg) {
  cfg.experiment = ExperimentKind::fig3;
  return run_experiment(cfg);
}
inline SweepResult run_fig4(ExperimentConfig cfg) {
  cfg.experiment = ExperimentKind::fig4;
  return run_experiment(cfg);
}

struct SummaryRow {
  std::size_t point = 0;
  std::string sweep_value;
  SchemeId scheme = SchemeId::mm_sdr;
  int feasible_count = 0;
  int count = 0;
  double mean_dbm = std::numeric_limits<double>::quiet_NaN();
  double std_dbm = std::numeric_limits<double>::quiet_NaN();
};

/// Mean and sample standard deviation of P* in dBm over feasible draws.
inline std::vector<SummaryRow> summarize(const SweepResult& res) {
  std::map<std::pair<std::size_t, int>, std::vector<const SweepRow*>> groups;
  std::vector<std::pair<std::size_t, int>> order;
  for (const auto& r : res.rows) {
    const auto key = std::make_pair(r.point, static_cast<int>(r.scheme));
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    SummaryRow s;
    s.point = key.first;
    s.sweep_value = g.front()->sweep_value;
    s.scheme = g.front()->scheme;
    s.count = static_cast<int>(g.size());
    double sum = 0.0;
    for (const auto* r : g)
      if (r->feasible) {
        ++s.feasible_count;
        sum += r->p_star_dbm;
      }
    if (s.feasible_count > 0) {
      s.mean_dbm = sum / s.feasible_count;
      double ss = 0.0;
      for (const auto* r : g)
        if (r->feasible) ss += (r->p_star_dbm - s.mean_dbm) * (r->p_star_dbm - s.mean_dbm);
      s.std_dbm = s.feasible_count > 1 ? std::sqrt(ss / (s.feasible_count - 1)) : 0.0;
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline constexpr const char* kResultsHeader =
    "experiment,sweep_var_name,sweep_var_value,scheme,realization,p_star_dbm,feasible,mm_iterations,wall_ms";

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return f;
}

inline void finish_write(std::ofstream& f, const std::filesystem::path& p) {
  f.flush();
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

inline std::string number_or_na(double v) { return std::isfinite(v) ? format_double(v) : "NA"; }

inline std::string plot_script(const SweepResult& res, const std::vector<SummaryRow>& summary) {
  std::ostringstream gp;
  gp << "# gnuplot script: mean transmit power per scheme\n";
  gp << "set terminal svg size 800,500\nset output 'plot.svg'\nset grid\n";
  gp << "set ylabel 'mean P* [dBm]'\n";
  const bool fig4 = res.experiment == ExperimentKind::fig4;
  gp << "set xlabel '" << (fig4 ? std::string("tag-reader distance [m]") : res.sweep_var_name) << "'\n";
  // One curve per scheme (and per angle for the monostatic sweep).
  std::map<std::string, std::vector<std::pair<std::string, double>>> curves;
  std::vector<std::string> names;
  for (const auto& s : summary) {
    std::string name = to_string(s.scheme);
    std::string x = s.sweep_value;
    if (fig4) {
      const auto colon = x.find(':');
      name += " " + x.substr(colon + 1) + "deg";
      x = x.substr(0, colon);
    }
    if (!curves.count(name)) names.push_back(name);
    curves[name].emplace_back(x, s.mean_dbm);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    gp << "$c" << i << " << EOD\n";
    for (const auto& [x, y] : curves[names[i]]) gp << x << ' ' << number_or_na(y) << '\n';
    gp << "EOD\n";
  }
  gp << "set datafile missing 'NA'\nplot ";
  for (std::size_t i = 0; i < names.size(); ++i)
    gp << (i ? ", \\\n     " : "") << "$c" << i << " using 1:2 with linespoints title '" << names[i] << "'";
  gp << '\n';
  return gp.str();
}

}  // namespace detail

/// Writes results.csv, summary.csv, diagnostics.csv and plot.gp into `dir`.
/// results.csv carries wall_ms = 0 unless `record_timing`, so that repeated
/// runs are byte-identical; measured times always go to diagnostics.csv.
inline void emit_outputs(const SweepResult& res, const std::filesystem::path& dir, bool record_timing = false) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const std::string exp = to_string(res.experiment);

  {
    const auto p = dir / "results.csv";
    auto f = detail::open_for_write(p);
    f << kResultsHeader << '\n';
    for (const auto& r : res.rows)
      f << exp << ',' << res.sweep_var_name << ',' << r.sweep_value << ',' << to_string(r.scheme) << ','
        << r.realization << ',' << (r.feasible ? format_double(r.p_star_dbm) : "NA") << ',' << (r.feasible ? 1 : 0)
        << ',' << r.mm_iterations << ',' << (record_timing ? format_double(r.wall_ms) : "0") << '\n';
    detail::finish_write(f, p);
  }
  {
    const auto p = dir / "diagnostics.csv";
    auto f = detail::open_for_write(p);
    f << "sweep_var_value,scheme,realization,converged,wall_ms\n";
    for (const auto& r : res.rows)
      f << r.sweep_value << ',' << to_string(r.scheme) << ',' << r.realization << ',' << (r.converged ? 1 : 0) << ','
        << format_double(r.wall_ms) << '\n';
    detail::finish_write(f, p);
  }
  const auto summary = summarize(res);
  {
    const auto p = dir / "summary.csv";
    auto f = detail::open_for_write(p);
    f << "experiment,sweep_var_name,sweep_var_value,scheme,realizations,feasible,mean_p_star_dbm,std_p_star_db\n";
    for (const auto& s : summary)
      f << exp << ',' << res.sweep_var_name << ',' << s.sweep_value << ',' << to_string(s.scheme) << ',' << s.count
        << ',' << s.feasible_count << ',' << detail::number_or_na(s.mean_dbm) << ','
        << detail::number_or_na(s.std_dbm) << '\n';
    detail::finish_write(f, p);
  }
  {
    const auto p = dir / "plot.gp";
    auto f = detail::open_for_write(p);
    f << detail::plot_script(res, summary);
    detail::finish_write(f, p);
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double_exact(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

}  // namespace detail

/// Reads results.csv (and diagnostics.csv when present) back into memory.
inline SweepResult read_results(const std::filesystem::path& dir) {
  const auto p = dir / "results.csv";
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::string line;
  if (!std::getline(f, line) || line != kResultsHeader) throw std::runtime_error(p.string() + ": unexpected header");
  SweepResult res;
  std::map<std::string, std::size_t> point_index;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = detail::split_csv_line(line);
    if (c.size() != 9) throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": expected 9 columns");
    try {
      res.experiment = parse_experiment(c[0]);
      res.sweep_var_name = c[1];
      SweepRow r;
      auto [it, inserted] = point_index.emplace(c[2], point_index.size());
      if (inserted) res.point_labels.push_back(c[2]);
      r.point = it->second;
      r.sweep_value = c[2];
      const auto s = parse_scheme(c[3]);
      if (!s) throw std::runtime_error("unknown scheme '" + c[3] + "'");
      r.scheme = *s;
      r.realization = std::stoi(c[4]);
      r.feasible = c[6] == "1";
      r.p_star_dbm = r.feasible ? detail::parse_double_exact(c[5]) : std::numeric_limits<double>::quiet_NaN();
      r.mm_iterations = std::stoi(c[7]);
      r.wall_ms = detail::parse_double_exact(c[8]);
      res.rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }

  const auto dp = dir / "diagnostics.csv";
  std::ifstream d(dp, std::ios::binary);
  if (d) {
    std::getline(d, line);
    std::size_t i = 0;
    while (std::getline(d, line) && i < res.rows.size()) {
      if (line.empty()) continue;
      const auto c = detail::split_csv_line(line);
      if (c.size() != 5 || c[0] != res.rows[i].sweep_value || c[1] != to_string(res.rows[i].scheme))
        throw std::runtime_error(dp.string() + ": rows do not match results.csv");
      res.rows[i].converged = c[3] == "1";
      res.rows[i].wall_ms = detail::parse_double_exact(c[4]);
      ++i;
    }
  }
  return res;
}

}  // namespace irsbc
