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

#pragma once

#include "irsbc/mm.hpp"
#include "irsbc/signal_model.hpp"

#include <string>

namespace irsbc {

/// Link requirements shared by every solver entry point.
struct LinkTarget {
  double snr_threshold = db_to_linear(8.0);  // gamma_th (linear)
  double noise_power = dbm_to_watts(-110.0);  // sigma_R^2 [W]

  double noise_term() const { return snr_threshold * noise_power; }
};

enum class Regime { no_circuit, dinkelbach, circuit_limited, noise_limited, monostatic };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::no_circuit: return "no_circuit";
    case Regime::dinkelbach: return "dinkelbach";
    case Regime::circuit_limited: return "circuit_limited";
    case Regime::noise_limited: return "noise_limited";
    case Regime::monostatic: return "monostatic";
  }
  return "unknown";
}

struct SolverSolution {
  CVec w;
  PhaseVector theta;
  double alpha = 1.0;
  double p_star = 0.0;
  Regime regime_used = Regime::no_circuit;
  MmTrace diagnostics;
  std::vector<double> dinkelbach_y;  // filled by the Dinkelbach solver
  bool feasible = true;
  std::string status = "ok";

  static SolverSolution infeasible(Regime r, std::string why) {
    SolverSolution s;
    s.regime_used = r;
    s.feasible = false;
    s.p_star = std::numeric_limits<double>::infinity();
    s.status = std::move(why);
    return s;
  }
};

/// w = sqrt(P) (H2 H1)^H / ||H2 H1||.
inline CVec mrt_beamformer(const CompositeLinks& links, double power) {
  if (!(power >= 0.0)) throw std::invalid_argument("transmit power must be non-negative");
  const CRow g = links.product();
  const double nrm = g.norm();
  if (!(nrm > 0.0)) throw std::domain_error("composite channel is zero; no beam direction");
  return std::sqrt(power) * g.adjoint() / nrm;
}

/// Regime indicator (xi/eta)|b|^2|H2|^2 / (gamma sigma^2).
inline double regime_indicator(const CompositeLinks& links, const TagParams& tag, const LinkTarget& target) {
  if (tag.circuit_power == 0.0) return 0.0;
  return tag.circuit_power / tag.harvest_efficiency * tag.b2() * std::norm(links.h2) / target.noise_term();
}

/// alpha* together with 1 - alpha*, each from its own closed form so that the
/// harvested share keeps full precision when alpha* is close to 1.
struct PowerSplit {
  double alpha = 1.0;
  double complement = 0.0;
};

inline PowerSplit power_split_star(const CompositeLinks& links, const TagParams& tag, const LinkTarget& target) {
  const double h1 = links.h1.squaredNorm();
  if (!(h1 > 0.0)) throw std::domain_error("alpha_star: CE-to-tag link is zero (infeasible)");
  const double snr_side = tag.harvest_efficiency * target.noise_term() * h1;
  const double circuit_side = tag.circuit_power * tag.b2() * std::norm(links.h2) * h1;
  const double total = snr_side + circuit_side;
  return {snr_side / total, circuit_side / total};
}

/// Power split equalizing the SNR-limited and circuit-limited power terms.
inline double alpha_star(const CompositeLinks& links, const TagParams& tag, const LinkTarget& target) {
  return power_split_star(links, tag, target).alpha;
}

inline double alpha_star(const ChannelSet& ch, const PhaseVector& phases, const TagParams& tag,
                         const LinkTarget& target) {
  return alpha_star(composite_links(ch, phases), tag, target);
}

/// The two lower bounds on P for a given alpha; P' is their maximum.
struct PowerBranches {
  double snr_limited;
  double circuit_limited;
  double p_prime() const { return std::max(snr_limited, circuit_limited); }
};

inline PowerBranches power_branches(const CompositeLinks& links, const TagParams& tag, const LinkTarget& target,
                                    PowerSplit split) {
  const double h1 = links.h1.squaredNorm();
  const double f = std::norm(links.h2) * h1;
  return {target.noise_term() / (split.alpha * tag.b2() * f),
          tag.circuit_power / (tag.harvest_efficiency * split.complement * h1)};
}

inline PowerBranches power_branches(const CompositeLinks& links, const TagParams& tag, const LinkTarget& target,
                                    double alpha) {
  return power_branches(links, tag, target, PowerSplit{alpha, 1.0 - alpha});
}

/// P* = (gamma sigma^2 + (xi/eta)|b|^2|H2|^2) / (|b|^2 ||H2 H1||^2). Reduces
/// to the circuit-free power when xi = 0.
inline double p_star(const CompositeLinks& links, const TagParams& tag, const LinkTarget& target) {
  const double f = links.product().squaredNorm();
  if (!(f > 0.0)) throw std::domain_error("p_star: composite channel is zero (infeasible)");
  const double circuit =
      tag.circuit_power > 0.0 ? tag.circuit_power / tag.harvest_efficiency * tag.b2() * std::norm(links.h2) : 0.0;
  return (target.noise_term() + circuit) / (tag.b2() * f);
}

inline double p_star(const ChannelSet& ch, const PhaseVector& phases, const TagParams& tag,
                     const LinkTarget& target) {
  return p_star(composite_links(ch, phases), tag, target);
}

/// Completes a solution from fixed phases: alpha*, P*, MRT beam.
inline SolverSolution finish_solution(const ChannelSet& ch, const PhaseVector& phases, const TagParams& tag,
                                      const LinkTarget& target, Regime regime) {
  const CompositeLinks links = composite_links(ch, phases);
  if (!(links.product().squaredNorm() > 0.0))
    return SolverSolution::infeasible(regime, "composite channel is zero");
  if (tag.circuit_power > 0.0 && !(tag.harvest_efficiency > 0.0))
    return SolverSolution::infeasible(regime, "tag cannot harvest (eta = 0)");
  SolverSolution s;
  s.theta = phases;
  s.regime_used = regime;
  s.alpha = tag.circuit_power > 0.0 ? alpha_star(links, tag, target) : 1.0;
  s.p_star = p_star(links, tag, target);
  s.w = mrt_beamformer(links, s.p_star);
  return s;
}

/// Semipassive tag (xi = 0): alpha = 1, MM phases, SNR constraint tight.
inline SolverSolution min_power_no_circuit(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target,
                                           const MmConfig& cfg) {
  tag.validate();
  if (tag.circuit_power != 0.0) throw std::invalid_argument("min_power_no_circuit requires xi = 0");
  MmResult mm = optimize_phases_nc(ch, cfg);
  SolverSolution s = finish_solution(ch, mm.phases, tag, target, Regime::no_circuit);
  s.diagnostics = std::move(mm.trace);
  return s;
}

/// Circuit-dominated regime: phases maximize ||H1||^2 alone (one SDR).
inline SolverSolution solve_circuit_limited(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target,
                                            const MmConfig& cfg) {
  tag.validate();
  ch.validate();
  if (!(tag.circuit_power > 0.0)) throw std::invalid_argument("circuit-limited regime requires xi > 0");
  const PhaseVector phases = align_cit_phases(ch, cfg.sdp, derive_seed({cfg.seed, 0xC1DCULL}));
  return finish_solution(ch, phases, tag, target, Regime::circuit_limited);
}

/// Noise-dominated regime: the circuit-free phase problem, then alpha*, P*.
inline SolverSolution solve_noise_limited(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target,
                                          const MmConfig& cfg) {
  tag.validate();
  if (!(tag.circuit_power > 0.0)) throw std::invalid_argument("noise-limited regime requires xi > 0");
  MmResult mm = optimize_phases_nc(ch, cfg);
  SolverSolution s = finish_solution(ch, mm.phases, tag, target, Regime::noise_limited);
  s.diagnostics = std::move(mm.trace);
  return s;
}

/// Full Dinkelbach over the ratio A/B, started from the best of the MM
/// circuit-free phases and the ||H1||^2-maximizing phases.
inline SolverSolution solve_dinkelbach(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target,
                                       const MmConfig& cfg, std::vector<PhaseVector> starts = {}) {
  tag.validate();
  if (!(tag.circuit_power > 0.0)) throw std::invalid_argument("Dinkelbach requires xi > 0");
  if (starts.empty()) {
    starts.push_back(optimize_phases_nc(ch, cfg).phases);
    starts.push_back(align_cit_phases(ch, cfg.sdp, derive_seed({cfg.seed, 0xC1DCULL})));
  }
  DinkelbachResult d = optimize_phases_dinkelbach(ch, tag.b2(), tag.circuit_power, tag.harvest_efficiency,
                                                  target.snr_threshold, target.noise_power, cfg, starts);
  SolverSolution s = finish_solution(ch, d.phases, tag, target, Regime::dinkelbach);
  s.diagnostics = std::move(d.last_trace);
  s.diagnostics.converged = s.diagnostics.converged && d.converged;
  s.diagnostics.solver_failure = s.diagnostics.solver_failure || d.solver_failure;
  s.dinkelbach_y = std::move(d.y_values);
  return s;
}

enum class RegimeChoice { automatic, dinkelbach, circuit, noise };

struct RegimeThresholds {
  double circuit_limited = 100.0;  // indicator >= this: circuit-limited shortcut
  double noise_limited = 0.01;     // indicator <= this: noise-limited shortcut
};

/// Dispatches on xi and the regime indicator evaluated at the circuit-free
/// MM phases.
inline SolverSolution solve(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target, const MmConfig& cfg,
                            RegimeChoice choice = RegimeChoice::automatic, RegimeThresholds thr = {}) {
  tag.validate();
  if (tag.circuit_power == 0.0) return min_power_no_circuit(ch, tag, target, cfg);
  switch (choice) {
    case RegimeChoice::dinkelbach: return solve_dinkelbach(ch, tag, target, cfg);
    case RegimeChoice::circuit: return solve_circuit_limited(ch, tag, target, cfg);
    case RegimeChoice::noise: return solve_noise_limited(ch, tag, target, cfg);
    case RegimeChoice::automatic: break;
  }
  MmResult nc = optimize_phases_nc(ch, cfg);
  const double ind = regime_indicator(composite_links(ch, nc.phases), tag, target);
  if (ind >= thr.circuit_limited) return solve_circuit_limited(ch, tag, target, cfg);
  if (ind <= thr.noise_limited) {
    SolverSolution s = finish_solution(ch, nc.phases, tag, target, Regime::noise_limited);
    s.diagnostics = std::move(nc.trace);
    return s;
  }
  std::vector<PhaseVector> starts{nc.phases, align_cit_phases(ch, cfg.sdp, derive_seed({cfg.seed, 0xC1DCULL}))};
  return solve_dinkelbach(ch, tag, target, cfg, std::move(starts));
}

/// Monostatic reader, semipassive tag: every element is phase-aligned with
/// the direct reader-tag link and P* = gamma sigma^2 / (|b|^2 |H2|^4).
inline SolverSolution solve_monostatic(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target) {
  tag.validate();
  ch.validate();
  if (ch.architecture != Architecture::monostatic || ch.antennas() != 1)
    throw std::domain_error("solve_monostatic needs a reciprocal single-antenna channel set");
  if (tag.circuit_power != 0.0) throw std::invalid_argument("monostatic closed form assumes a semipassive tag");
  const PhaseVector phases = align_tir_phases(ch);
  const CompositeLinks links = composite_links(ch, phases);
  const double h2 = std::norm(links.h2);
  if (!(h2 > 0.0)) return SolverSolution::infeasible(Regime::monostatic, "reader-tag link is zero");
  SolverSolution s;
  s.theta = phases;
  s.regime_used = Regime::monostatic;
  s.alpha = 1.0;
  s.p_star = target.noise_term() / (tag.b2() * h2 * h2);
  s.w = mrt_beamformer(links, s.p_star);
  s.diagnostics.converged = true;
  return s;
}

}  // namespace irsbc
