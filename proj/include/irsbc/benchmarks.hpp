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

// Reference schemes and brute-force oracles. Nothing in here feeds back into
// the MM path except the alignment helpers it shares.

#pragma once

#include "irsbc/alignment.hpp"
#include "irsbc/power.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace irsbc {

enum class SchemeId { mm_sdr, no_irs, random_phases, align_cit, align_tir, grid_oracle, monostatic };

inline std::string to_string(SchemeId s) {
  switch (s) {
    case SchemeId::mm_sdr: return "mm_sdr";
    case SchemeId::no_irs: return "no_irs";
    case SchemeId::random_phases: return "random_phases";
    case SchemeId::align_cit: return "align_cit";
    case SchemeId::align_tir: return "align_tir";
    case SchemeId::grid_oracle: return "grid_oracle";
    case SchemeId::monostatic: return "monostatic";
  }
  return "unknown";
}

inline std::optional<SchemeId> parse_scheme(std::string_view name) {
  for (auto s : {SchemeId::mm_sdr, SchemeId::no_irs, SchemeId::random_phases, SchemeId::align_cit,
                 SchemeId::align_tir, SchemeId::grid_oracle, SchemeId::monostatic})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

/// Direct links only, MRT on h_ct.
inline double no_irs_power(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target) {
  const double denom = tag.b2() * std::norm(ch.h_tr) * ch.h_ct.squaredNorm();
  if (!(denom > 0.0)) throw std::domain_error("no_irs_power: direct links are zero (infeasible)");
  const double circuit =
      tag.circuit_power > 0.0 ? tag.circuit_power / tag.harvest_efficiency * tag.b2() * std::norm(ch.h_tr) : 0.0;
  return (target.noise_term() + circuit) / denom;
}

/// P* for one uniformly random phase vector.
inline double random_phase_power(const ChannelSet& ch, const TagParams& tag, const LinkTarget& target,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return p_star(ch, PhaseVector::random(ch.elements(), rng), tag, target);
}

enum class AlignedLink { cit, tir };

inline PhaseVector align_single_link(const ChannelSet& ch, AlignedLink which, const SolverConfig& cfg = {},
                                     std::uint64_t seed = 1) {
  return which == AlignedLink::tir ? align_tir_phases(ch) : align_cit_phases(ch, cfg, seed);
}

struct GridOracleResult {
  PhaseVector phases;
  double f_best = 0.0;
  std::uint64_t evaluations = 0;
};

class GridBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive search over theta_n in {2 pi k / levels}. F is evaluated
/// through the composite links, not the quadratic forms. The lowest
/// enumeration index wins ties.
inline GridOracleResult grid_search_oracle(const ChannelSet& ch, int levels, std::uint64_t budget = 10'000'000,
                                           unsigned threads = 1) {
  if (levels < 1) throw std::invalid_argument("grid levels must be positive");
  const auto n = ch.elements();
  double total = std::pow(static_cast<double>(levels), static_cast<double>(n));
  if (total > static_cast<double>(budget))
    throw GridBudgetExceeded("grid oracle: " + std::to_string(levels) + "^" + std::to_string(n) +
                             " points exceed the budget");
  const auto count = static_cast<std::uint64_t>(std::llround(total));

  auto phases_at = [&](std::uint64_t idx) {
    RVec t(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      t(k) = kTwoPi * static_cast<double>(idx % levels) / levels;
      idx /= levels;
    }
    return PhaseVector(std::move(t));
  };
  auto eval = [&](std::uint64_t idx) { return composite_links(ch, phases_at(idx)).product().squaredNorm(); };

  threads = std::max(1u, threads);
  std::vector<std::uint64_t> best_idx(threads, 0);
  std::vector<double> best_val(threads, -1.0);
  const std::uint64_t chunk = (count + threads - 1) / threads;
  parallel_for(
      threads,
      [&](std::size_t t) {
        const std::uint64_t lo = t * chunk;
        const std::uint64_t hi = std::min(count, lo + chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
          const double f = eval(i);
          if (f > best_val[t]) {
            best_val[t] = f;
            best_idx[t] = i;
          }
        }
      },
      threads);
  std::size_t win = 0;
  for (std::size_t t = 1; t < threads; ++t)
    if (best_val[t] > best_val[win]) win = t;
  return {phases_at(best_idx[win]), best_val[win], count};
}

/// Worst mismatch between the linearization 2 Re{(T v0)^H d} and central
/// differences (F(v0 + h d) - F(v0 - h d)) / 2h over random unit directions
/// d, relative to the gradient norm 2 |T v0|.
inline double finite_diff_gradient_check(const CMat& r, const CMat& s, double c1, double c2, const CVec& v0,
                                         double step, int directions = 100, std::uint64_t seed = 7) {
  if (!(step > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  const CVec tv = linearization_matrix(r, s, c1, c2, v0) * v0;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) {
    CVec d = complex_gaussian(v0.size(), rng);
    d.normalize();
    const double analytic = 2.0 * tv.dot(d).real();
    const double fd =
        (quartic_F(r, s, c1, c2, v0 + step * d) - quartic_F(r, s, c1, c2, v0 - step * d)) / (2.0 * step);
    const double scale = std::max(2.0 * tv.norm(), std::numeric_limits<double>::min());
    worst = std::max(worst, std::abs(analytic - fd) / scale);
  }
  return worst;
}

}  // namespace irsbc
