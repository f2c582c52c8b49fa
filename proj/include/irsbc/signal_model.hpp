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

#include "irsbc/common.hpp"
#include "irsbc/geometry.hpp"

#include <stdexcept>

namespace irsbc {

struct TagParams {
  double reflection_magnitude = 1.0;  // |b|, shared by all impedance states
  int impedance_count = 2;            // metadata only
  double power_split = 1.0;           // alpha, fraction reflected
  double circuit_power = 0.0;         // xi [W]
  double harvest_efficiency = 1.0;    // eta

  double b2() const { return reflection_magnitude * reflection_magnitude; }

  void validate() const {
    if (!(reflection_magnitude > 0.0 && reflection_magnitude <= 1.0))
      throw std::invalid_argument("reflection magnitude must lie in (0, 1]");
    if (impedance_count < 1) throw std::invalid_argument("impedance count must be positive");
    if (!(power_split >= 0.0 && power_split <= 1.0))
      throw std::invalid_argument("power split must lie in [0, 1]");
    if (!(circuit_power >= 0.0)) throw std::invalid_argument("circuit power must be non-negative");
    if (!(harvest_efficiency >= 0.0 && harvest_efficiency <= 1.0))
      throw std::invalid_argument("harvest efficiency must lie in [0, 1]");
  }
};

/// IRS phase shifts theta_n in [0, 2pi).
///
/// The optimization variable is v = conj([e^{j theta_1}, ..., e^{j theta_N}]),
/// homogenized as vbar = [v; 1] and vbarbar = [vbar; 1]. Going back from a
/// homogenized vector rotates out the phase of its last entry first.
class PhaseVector {
 public:
  PhaseVector() = default;
  explicit PhaseVector(RVec theta) : theta_(std::move(theta)) {
    for (Eigen::Index i = 0; i < theta_.size(); ++i) theta_(i) = wrap_phase(theta_(i));
  }
  static PhaseVector zeros(Eigen::Index n) { return PhaseVector(RVec::Zero(n)); }

  template <class Rng>
  static PhaseVector random(Eigen::Index n, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    RVec t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = u(rng);
    return PhaseVector(std::move(t));
  }

  /// From v (length N), |v_n| = 1.
  static PhaseVector from_v(const CVec& v) {
    RVec t(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) t(i) = -std::arg(v(i));
    return PhaseVector(std::move(t));
  }

  /// From vbar (length N+1): rotate so the last entry is 1, then drop it.
  static PhaseVector from_vbar(const CVec& vbar) {
    const CVec r = rotate_last_to_one(unit_modulus(vbar));
    return from_v(r.head(r.size() - 1));
  }

  /// From vbarbar (length N+2): de-homogenize both layers.
  static PhaseVector from_vbarbar(const CVec& vbb) {
    const CVec r = rotate_last_to_one(unit_modulus(vbb));
    return from_vbar(r.head(r.size() - 1));
  }

  Eigen::Index size() const { return theta_.size(); }
  const RVec& theta() const { return theta_; }
  double operator[](Eigen::Index i) const { return theta_(i); }

  /// diag entries of Theta: e^{j theta_n}
  CVec reflection() const {
    CVec r(theta_.size());
    for (Eigen::Index i = 0; i < theta_.size(); ++i) r(i) = std::polar(1.0, theta_(i));
    return r;
  }
  CVec v() const { return reflection().conjugate(); }
  CVec vbar() const {
    CVec out(theta_.size() + 1);
    out.head(theta_.size()) = v();
    out(theta_.size()) = 1.0;
    return out;
  }
  CVec vbarbar() const {
    CVec out(theta_.size() + 2);
    out.head(theta_.size() + 1) = vbar();
    out(theta_.size() + 1) = 1.0;
    return out;
  }

 private:
  RVec theta_;
};

/// H1 = h_ti^H Theta H_ci + h_ct (1 x L), H2 = h_ri^H Theta h_ti + h_tr.
struct CompositeLinks {
  CRow h1;
  cd h2{0.0, 0.0};

  /// The cascade H2 * H1 (1 x L).
  CRow product() const { return h2 * h1; }
};

inline CompositeLinks composite_links(const ChannelSet& ch, const PhaseVector& phases) {
  if (phases.size() != ch.elements() || ch.h_ci.rows() != ch.elements() ||
      ch.h_ri.size() != ch.elements() || ch.h_ci.cols() != ch.antennas())
    throw std::invalid_argument("composite_links: dimension mismatch");
  const CVec refl = phases.reflection();
  const CVec u = refl.cwiseProduct(ch.h_ti.conjugate());
  CompositeLinks out;
  out.h1 = u.transpose() * ch.h_ci + ch.h_ct;
  out.h2 = (ch.h_ri.conjugate().cwiseProduct(refl).cwiseProduct(ch.h_ti)).sum() + ch.h_tr;
  return out;
}

inline double received_snr(const CompositeLinks& links, const CVec& w, const TagParams& tag,
                           double noise_power) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be positive");
  const cd y = links.h2 * (links.h1 * w)(0);
  return tag.power_split * tag.b2() * std::norm(y) / noise_power;
}

inline double harvested_power(const CompositeLinks& links, const CVec& w, const TagParams& tag) {
  return tag.harvest_efficiency * (1.0 - tag.power_split) * std::norm((links.h1 * w)(0));
}

/// Hermitian forms with ||H1||^2 = vbar^H r vbar + c1 and
/// |H2|^2 = vbar^H s vbar + c2.
struct QuadraticForms {
  CMat r;
  CMat s;
  double c1 = 0.0;
  double c2 = 0.0;

  Eigen::Index elements() const { return r.rows() - 1; }
};

/// R = [Phi Phi^H, Phi h_ct^H; h_ct Phi^H, 0] with Phi = diag(h_ti^H) H_ci.
inline std::pair<CMat, double> build_R(const ChannelSet& ch) {
  const auto n = ch.elements();
  const CMat phi = ch.h_ti.conjugate().asDiagonal() * ch.h_ci;  // N x L
  CMat r = CMat::Zero(n + 1, n + 1);
  r.topLeftCorner(n, n) = phi * phi.adjoint();
  r.topRightCorner(n, 1) = phi * ch.h_ct.adjoint();
  r.bottomLeftCorner(1, n) = ch.h_ct * phi.adjoint();
  return {r, ch.h_ct.squaredNorm()};
}

/// S = [phi phi^H, phi conj(h_tr); h_tr phi^H, 0] with phi = diag(h_ri^H) h_ti.
inline std::pair<CMat, double> build_S(const ChannelSet& ch) {
  const auto n = ch.elements();
  const CVec phi = ch.h_ri.conjugate().cwiseProduct(ch.h_ti);
  CMat s = CMat::Zero(n + 1, n + 1);
  s.topLeftCorner(n, n) = phi * phi.adjoint();
  s.topRightCorner(n, 1) = phi * std::conj(ch.h_tr);
  s.bottomLeftCorner(1, n) = ch.h_tr * phi.adjoint();
  return {s, std::norm(ch.h_tr)};
}

inline QuadraticForms build_quadratic_forms(const ChannelSet& ch) {
  auto [r, c1] = build_R(ch);
  auto [s, c2] = build_S(ch);
  return QuadraticForms{std::move(r), std::move(s), c1, c2};
}

/// F(vbar) = (vbar^H R vbar + c1)(vbar^H S vbar + c2) = ||H2 H1||^2.
inline double quartic_F(const CMat& r, const CMat& s, double c1, double c2, const CVec& vbar) {
  return (hermitian_form(r, vbar) + c1) * (hermitian_form(s, vbar) + c2);
}

inline double quartic_F(const QuadraticForms& q, const CVec& vbar) {
  return quartic_F(q.r, q.s, q.c1, q.c2, vbar);
}

/// T = R v0 v0^H S + S v0 v0^H R + c2 R + c1 S. The directional derivative
/// of F at v0 along d is 2 Re{(T v0)^H d}.
inline CMat linearization_matrix(const CMat& r, const CMat& s, double c1, double c2, const CVec& v0) {
  const CVec rv = r * v0;
  const CVec sv = s * v0;
  return rv * sv.adjoint() + sv * rv.adjoint() + c2 * r + c1 * s;
}

}  // namespace irsbc
