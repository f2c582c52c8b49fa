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

// Minorization-maximization over the IRS phases.
//
// Each iteration replaces the quartic objective by the quadratic minorizer
//
//   G(v) >= G(v0) + 2 Re{(T v0)^H (v - v0)} - (l/2) ||v - v0||^2,
//
// lifts it to tr(U V) over V = vv^H with unit diagonal, solves the SDP, and
// recovers a unit-modulus point by Gaussian randomization. The previous
// iterate always competes with the random candidates, so G never decreases.

#pragma once

#include "irsbc/alignment.hpp"
#include "irsbc/sdp.hpp"
#include "irsbc/signal_model.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>
#include <vector>

namespace irsbc {

/// fixed: the configured constant. adaptive: the global curvature bound.
/// backtracking: per-iteration l, halved after every step and doubled while
/// the new point falls below the model, never exceeding the adaptive bound.
enum class CurvatureMode { fixed, adaptive, backtracking };

struct MmConfig {
  CurvatureMode curvature_mode = CurvatureMode::backtracking;
  double fixed_curvature = 2.5e-16;
  double min_curvature_fraction = 1.0 / 1024.0;  // backtracking floor, relative to the bound
  double convergence_threshold = 1e-4;  // relative change of the objective
  int max_outer_iterations = 50;
  bool extrapolate = true;  // line search along the two-step direction, kept only if it improves
  int random_starts = 1;
  bool aligned_starts = true;  // add the two single-link alignments as starts
  unsigned start_threads = 1;
  SolverConfig sdp{};
  std::uint64_t seed = 1;

  int dinkelbach_max_iterations = 10;
  double dinkelbach_tolerance = 1e-4;

  void validate() const {
    if (!(convergence_threshold > 0.0)) throw std::invalid_argument("convergence threshold must be positive");
    if (max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations must be >= 1");
    if (curvature_mode == CurvatureMode::fixed && !(fixed_curvature > 0.0))
      throw std::invalid_argument("fixed curvature must be positive");
    if (!(min_curvature_fraction > 0.0 && min_curvature_fraction <= 1.0))
      throw std::invalid_argument("min_curvature_fraction must lie in (0, 1]");
    if (random_starts < 0) throw std::invalid_argument("random_starts must be >= 0");
    if (random_starts == 0 && !aligned_starts) throw std::invalid_argument("MM needs at least one start");
    if (sdp.randomization_count < 1) throw std::invalid_argument("randomization count must be >= 1");
    if (dinkelbach_max_iterations < 1 || !(dinkelbach_tolerance > 0.0))
      throw std::invalid_argument("invalid Dinkelbach settings");
  }
};

/// G(vbar) = product_weight * F(vbar) - s_weight * (vbar^H S vbar + c2) - offset.
/// Plain F uses the defaults; the Dinkelbach subproblem A - yB sets all three.
struct PhaseObjective {
  QuadraticForms forms;
  double product_weight = 1.0;
  double s_weight = 0.0;
  double offset = 0.0;

  double value(const CVec& vbar) const {
    const double a = hermitian_form(forms.r, vbar) + forms.c1;
    const double b = hermitian_form(forms.s, vbar) + forms.c2;
    return product_weight * a * b - s_weight * b - offset;
  }
  /// Size of the terms making up value(); used to normalize changes.
  double magnitude(const CVec& vbar) const {
    const double a = hermitian_form(forms.r, vbar) + forms.c1;
    const double b = hermitian_form(forms.s, vbar) + forms.c2;
    return std::abs(product_weight * a * b) + std::abs(s_weight * b) + std::abs(offset);
  }
  CMat linearization(const CVec& v0) const {
    CMat t = product_weight * linearization_matrix(forms.r, forms.s, forms.c1, forms.c2, v0);
    if (s_weight != 0.0) t -= s_weight * forms.s;
    return t;
  }
};

struct MinorizerModel {
  CMat t;              // (N+1) x (N+1)
  CMat u;              // (N+2) x (N+2)
  double curvature = 0.0;
  CVec anchor;         // vbar0
  double constant = 0.0;

  /// Model value at vbar: (l/2) [vbar; 1]^H U [vbar; 1] + c.
  double value(const CVec& vbar) const {
    CVec vbb(vbar.size() + 1);
    vbb.head(vbar.size()) = vbar;
    vbb(vbar.size()) = 1.0;
    return value_homogenized(vbb);
  }
  double value_homogenized(const CVec& vbb) const { return 0.5 * curvature * hermitian_form(u, vbb) + constant; }
  /// Best unit-modulus point of the model: the off-diagonal block of U is
  /// its only phase-dependent part, so x_n = phase(-q_n) with x_{M} = 1.
  CVec rank_one_maximizer() const {
    const auto m = u.rows();
    CVec x(m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      const cd c = u(i, m - 1);
      x(i) = std::abs(c) > 0.0 ? c / std::abs(c) : (i < anchor.size() ? anchor(i) : cd(1.0, 0.0));
    }
    x(m - 1) = 1.0;
    return x;
  }
};

/// U = -[I, q; q^H, 0] with q = -(2/l) T v0 - v0, and c chosen so that the
/// model touches the objective at v0.
inline MinorizerModel build_minorizer(const PhaseObjective& obj, const CVec& v0, double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("curvature must be positive");
  const auto n1 = v0.size();
  MinorizerModel m;
  m.t = obj.linearization(v0);
  m.curvature = ell;
  m.anchor = v0;
  const CVec tv = m.t * v0;
  const CVec q = -(2.0 / ell) * tv - v0;
  m.u = CMat::Zero(n1 + 1, n1 + 1);
  m.u.topLeftCorner(n1, n1) = -CMat::Identity(n1, n1);
  m.u.topRightCorner(n1, 1) = -q;
  m.u.bottomLeftCorner(1, n1) = -q.adjoint();
  m.constant = obj.value(v0) - 2.0 * v0.dot(tv).real() - 0.5 * ell * v0.squaredNorm();
  return m;
}

inline MinorizerModel build_minorizer(const CMat& r, const CMat& s, double c1, double c2, const CVec& v0,
                                      double ell) {
  return build_minorizer(PhaseObjective{QuadraticForms{r, s, c1, c2}}, v0, ell);
}

/// Upper bound on the second directional derivative of F inside the ball
/// ||vbar||^2 <= N+1, which contains every segment between unit-modulus
/// points:  12 |R||S|(N+1) + 2 c2 |R| + 2 c1 |S|,  floored at 1e-30.
inline double estimate_curvature(const CMat& r, const CMat& s, double c1, double c2, Eigen::Index n) {
  const double nr = hermitian_spectral_norm(r);
  const double ns = hermitian_spectral_norm(s);
  const double radius2 = static_cast<double>(n + 1);
  const double ell = 12.0 * nr * ns * radius2 + 2.0 * c2 * nr + 2.0 * c1 * ns;
  return std::max(ell, 1e-30);
}

inline double curvature_for(const PhaseObjective& obj, const MmConfig& cfg) {
  const double base = cfg.curvature_mode == CurvatureMode::fixed
                          ? cfg.fixed_curvature
                          : estimate_curvature(obj.forms.r, obj.forms.s, obj.forms.c1, obj.forms.c2,
                                               obj.forms.elements());
  const double extra = obj.s_weight != 0.0 ? 2.0 * std::abs(obj.s_weight) * hermitian_spectral_norm(obj.forms.s) : 0.0;
  return std::max(std::abs(obj.product_weight) * base + extra, 1e-30);
}

struct MmTrace {
  std::vector<double> objective;       // objective[0] is the start value
  std::vector<PhaseVector> iterates;
  std::vector<double> curvature;       // l used by each accepted step
  int sdp_solves = 0;
  double wall_ms = 0.0;
  bool converged = false;
  bool solver_failure = false;  // some inner SDP stopped before its tolerance
  bool stalled = false;  // a step fell below the current objective and was discarded
  int start_index = 0;

  int iterations() const { return static_cast<int>(objective.size()) - 1; }
};

struct MmResult {
  PhaseVector phases;
  double objective = -std::numeric_limits<double>::infinity();
  MmTrace trace;
};

/// One MM run from `start`.
inline MmResult run_mm(const PhaseObjective& obj, const PhaseVector& start, const MmConfig& cfg,
                       std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto n = obj.forms.elements();
  if (start.size() != n) throw std::invalid_argument("run_mm: start has wrong length");
  MmResult res;
  CVec vbar = start.vbar();
  double g = obj.value(vbar);
  res.trace.objective.push_back(g);
  res.trace.iterates.push_back(start);

  if (n == 0) {
    res.trace.converged = true;
  } else {
    const double ell_cap = curvature_for(obj, cfg);
    const bool backtrack = cfg.curvature_mode == CurvatureMode::backtracking;
    const double ell_floor = ell_cap * cfg.min_curvature_fraction;
    double ell = backtrack ? ell_floor : ell_cap;
    for (int it = 1; it <= cfg.max_outer_iterations; ++it) {
      CVec vbb(n + 2);
      vbb.head(n + 1) = vbar;
      vbb(n + 1) = 1.0;
      const double scale = std::max(obj.magnitude(vbar), std::numeric_limits<double>::min());

      CVec next;
      double g_next = g;
      for (int attempt = 0;; ++attempt) {
        const MinorizerModel model = build_minorizer(obj, vbar, ell);
        SolverConfig sdp_cfg = cfg.sdp;
        sdp_cfg.rng_seed = derive_seed({seed, static_cast<std::uint64_t>(it), 1, static_cast<std::uint64_t>(attempt)});
        const SdpSolution sol = solve_diag_sdp(SdpProblem{model.u}, sdp_cfg, model.rank_one_maximizer());
        ++res.trace.sdp_solves;
        if (!sol.converged) res.trace.solver_failure = true;

        const std::vector<CVec> extra{vbb};
        const auto pick = gaussian_randomize(
            sol, model.u, cfg.sdp.randomization_count,
            derive_seed({seed, static_cast<std::uint64_t>(it), 2, static_cast<std::uint64_t>(attempt)}), extra);
        next = rotate_last_to_one(pick.best.head(n + 1));
        next(n) = 1.0;
        g_next = obj.value(next);  // F ignores the rotation; the model does not
        // The step is certified once the objective sits on or above the model
        // at the homogenized candidate, since that point beats the anchor.
        if (!backtrack || ell >= ell_cap || g_next >= model.value_homogenized(pick.best) - 1e-12 * scale) break;
        ell = std::min(2.0 * ell, ell_cap);
      }
      if (!(g_next >= g)) {
        // Only possible when the curvature is not a valid bound (fixed mode
        // with too small a constant). Repeating the step would not help.
        res.trace.stalled = true;
        break;
      } else if (cfg.extrapolate && g_next > g) {
        // MM steps on a flat ridge alternate in direction; the two-step
        // difference points along the ridge. Walk it with doubling steps
        // and keep the best point found (never worse than the MM step).
        const CVec base = res.trace.iterates.size() >= 2
                              ? res.trace.iterates[res.trace.iterates.size() - 2].vbar()
                              : vbar;
        const CVec dir = next - base;
        CVec best = next;
        double g_best = g_next;
        for (double beta = 1.0; beta <= 64.0; beta *= 2.0) {
          CVec e = rotate_last_to_one(unit_modulus(next + beta * dir));
          e(n) = 1.0;
          const double g_e = obj.value(e);
          if (!(g_e > g_best)) break;
          best = std::move(e);
          g_best = g_e;
        }
        next = std::move(best);
        g_next = g_best;
      }
      const double rel = std::abs(g_next - g) / scale;
      vbar = next;
      g = g_next;
      res.trace.objective.push_back(g);
      res.trace.iterates.push_back(PhaseVector::from_vbar(vbar));
      res.trace.curvature.push_back(ell);
      if (backtrack) ell = std::max(0.5 * ell, ell_floor);
      if (rel < cfg.convergence_threshold) {
        res.trace.converged = true;
        break;
      }
    }
  }
  res.phases = res.trace.iterates.back();
  res.objective = g;
  res.trace.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

/// Multi-start MM; the best final objective wins, lowest start index on ties.
inline MmResult optimize_phases(const PhaseObjective& obj, const std::vector<PhaseVector>& starts,
                                const MmConfig& cfg) {
  if (starts.empty()) throw std::invalid_argument("optimize_phases: no starts");
  std::vector<MmResult> runs(starts.size());
  parallel_for(
      starts.size(),
      [&](std::size_t i) {
        runs[i] = run_mm(obj, starts[i], cfg, derive_seed({cfg.seed, 0x3317ULL, i}));
        runs[i].trace.start_index = static_cast<int>(i);
      },
      cfg.start_threads);
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].objective > runs[best].objective) best = i;
  return std::move(runs[best]);
}

/// Starting points: the two single-link alignments (when enabled) followed
/// by seeded uniform-random phase vectors.
inline std::vector<PhaseVector> default_starts(const ChannelSet& ch, const MmConfig& cfg) {
  std::vector<PhaseVector> starts;
  const auto n = ch.elements();
  if (cfg.aligned_starts) {
    starts.push_back(align_tir_phases(ch));
    starts.push_back(align_cit_phases(ch, cfg.sdp, derive_seed({cfg.seed, 0xA11CULL})));
  }
  std::mt19937_64 rng(derive_seed({cfg.seed, 0x57A7ULL}));
  for (int k = 0; k < cfg.random_starts; ++k) starts.push_back(PhaseVector::random(n, rng));
  return starts;
}

/// Maximizes F = ||H2 H1||^2 over the phases.
inline MmResult optimize_phases_nc(const ChannelSet& ch, const MmConfig& cfg) {
  cfg.validate();
  ch.validate();
  const PhaseObjective obj{build_quadratic_forms(ch)};
  return optimize_phases(obj, default_starts(ch, cfg), cfg);
}

struct DinkelbachResult {
  PhaseVector phases;
  std::vector<double> y_values;  // y^(0), y^(1), ...
  int mm_iterations = 0;
  bool converged = false;
  bool solver_failure = false;
  MmTrace last_trace;
};

/// Ratio pieces: A = |b|^2 F, B = gamma sigma^2 + (xi/eta) |b|^2 |H2|^2.
struct FractionalObjective {
  QuadraticForms forms;
  double b2 = 1.0;
  double noise_term = 0.0;  // gamma_th * sigma^2
  double circuit_weight = 0.0;  // (xi / eta) |b|^2

  double numerator(const CVec& vbar) const { return b2 * quartic_F(forms, vbar); }
  double denominator(const CVec& vbar) const {
    return noise_term + circuit_weight * (hermitian_form(forms.s, vbar) + forms.c2);
  }
  double ratio(const CVec& vbar) const { return numerator(vbar) / denominator(vbar); }
  PhaseObjective subproblem(double y) const { return PhaseObjective{forms, b2, y * circuit_weight, y * noise_term}; }
};

/// Dinkelbach iteration for max A/B. Each step runs MM to convergence on
/// A - yB from the current phases, then sets y = A/B. The initial point is
/// the best ratio among `starts`.
inline DinkelbachResult optimize_phases_dinkelbach(const ChannelSet& ch, double b2, double circuit_power,
                                                   double harvest_efficiency, double snr_threshold,
                                                   double noise_power, const MmConfig& cfg,
                                                   std::vector<PhaseVector> starts = {}) {
  cfg.validate();
  ch.validate();
  if (!(circuit_power > 0.0))
    throw std::invalid_argument("Dinkelbach requires a positive circuit power; use optimize_phases_nc");
  if (!(harvest_efficiency > 0.0)) throw std::invalid_argument("harvest efficiency must be positive");
  FractionalObjective frac{build_quadratic_forms(ch), b2, snr_threshold * noise_power,
                           circuit_power / harvest_efficiency * b2};
  if (starts.empty()) starts = default_starts(ch, cfg);

  PhaseVector current = starts.front();
  double best_ratio = frac.ratio(current.vbar());
  for (std::size_t i = 1; i < starts.size(); ++i) {
    const double r = frac.ratio(starts[i].vbar());
    if (r > best_ratio) {
      best_ratio = r;
      current = starts[i];
    }
  }

  DinkelbachResult out;
  double y = best_ratio;
  out.y_values.push_back(y);
  for (int k = 1; k <= cfg.dinkelbach_max_iterations; ++k) {
    const PhaseObjective sub = frac.subproblem(y);
    MmResult inner = run_mm(sub, current, cfg, derive_seed({cfg.seed, 0xD1CEULL, static_cast<std::uint64_t>(k)}));
    out.mm_iterations += inner.trace.iterations();
    out.solver_failure = out.solver_failure || inner.trace.solver_failure;
    current = inner.phases;
    const CVec vbar = current.vbar();
    const double gap = frac.numerator(vbar) - y * frac.denominator(vbar);
    y = frac.ratio(vbar);
    out.y_values.push_back(y);
    out.last_trace = std::move(inner.trace);
    if (gap < cfg.dinkelbach_tolerance * frac.denominator(vbar)) {
      out.converged = true;
      break;
    }
  }
  out.phases = current;
  return out;
}

}  // namespace irsbc
