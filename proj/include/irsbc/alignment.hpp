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

// Single-link phase alignment, shared by the MM initializer and the
// benchmark schemes.

#pragma once

#include "irsbc/sdp.hpp"
#include "irsbc/signal_model.hpp"

namespace irsbc {

/// Coherently aligns every tag-IRS-reader cascade with h_tr:
/// theta_n = arg(h_tr) - arg(conj(h_ri,n) h_ti,n).
inline PhaseVector align_tir_phases(const ChannelSet& ch) {
  const auto n = ch.elements();
  RVec t(n);
  const double ref = std::arg(ch.h_tr);
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd cascade = std::conj(ch.h_ri(k)) * ch.h_ti(k);
    t(k) = cascade == cd(0.0, 0.0) ? 0.0 : ref - std::arg(cascade);
  }
  return PhaseVector(std::move(t));
}

/// Maximizes vbar^H Q vbar over unit-modulus vbar (last entry 1) with one
/// diagonal SDP followed by Gaussian randomization. `extra` candidates
/// (length N+1) compete with the samples.
inline CVec maximize_quadratic_sdr(const CMat& q, const SolverConfig& cfg, std::uint64_t seed,
                                   std::span<const CVec> extra = {}) {
  if (q.rows() <= 1) return CVec::Ones(q.rows());
  const SdpSolution sol = solve_diag_sdp(SdpProblem{q}, cfg);
  const auto best = gaussian_randomize(sol, q, cfg.randomization_count, seed, extra);
  return best.best;
}

/// Phases maximizing ||H1||^2. Closed form for a single CE antenna, SDR
/// otherwise (no closed form exists for the vector norm).
inline PhaseVector align_cit_phases(const ChannelSet& ch, const SolverConfig& cfg, std::uint64_t seed) {
  const auto n = ch.elements();
  if (n == 0) return PhaseVector{};
  const CMat phi = ch.h_ti.conjugate().asDiagonal() * ch.h_ci;
  if (ch.antennas() == 1) {
    RVec t(n);
    const double ref = std::arg(ch.h_ct(0));
    for (Eigen::Index k = 0; k < n; ++k)
      t(k) = phi(k, 0) == cd(0.0, 0.0) ? 0.0 : ref - std::arg(phi(k, 0));
    return PhaseVector(std::move(t));
  }
  // Candidate from aligning along the direct-link MRT direction.
  const double hn = ch.h_ct.norm();
  const CVec proj = hn > 0.0 ? CVec(phi * ch.h_ct.adjoint() / hn) : CVec(phi.col(0));
  RVec t(n);
  for (Eigen::Index k = 0; k < n; ++k) t(k) = proj(k) == cd(0.0, 0.0) ? 0.0 : -std::arg(proj(k));
  const std::vector<CVec> extra{PhaseVector(t).vbar()};
  const CMat r = build_R(ch).first;
  return PhaseVector::from_vbar(maximize_quadratic_sdr(r, cfg, seed, extra));
}

}  // namespace irsbc
