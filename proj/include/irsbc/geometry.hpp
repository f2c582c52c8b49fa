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

#include <functional>
#include <stdexcept>
#include <string>

namespace irsbc {

struct Position2D {
  double x = 0.0;
  double y = 0.0;

  friend Position2D operator+(Position2D a, Position2D b) { return {a.x + b.x, a.y + b.y}; }
  friend Position2D operator-(Position2D a, Position2D b) { return {a.x - b.x, a.y - b.y}; }
  friend Position2D operator*(double s, Position2D a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Position2D&, const Position2D&) = default;

  double norm() const { return std::hypot(x, y); }
  double dot(Position2D o) const { return x * o.x + y * o.y; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Position2D a, Position2D b) { return (a - b).norm(); }

/// Planar reflecting surface. Elements sit on a grid with ceil(sqrt(N))
/// columns filled row-major; each row runs perpendicular to `orientation`
/// and rows are stacked along it. The full grid is centred on `center`.
struct IrsGeometry {
  Position2D center{20.0, 20.0};
  Position2D orientation{0.0, -1.0};  // unit normal, points toward the illuminated side
  int element_count = 64;
  double element_width = 0.0;  // meters; 0 means "one wavelength"

  void validate() const {
    if (!center.finite()) throw std::invalid_argument("IRS center must be finite");
    if (std::abs(orientation.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("IRS orientation must be a unit vector");
    if (element_count < 0) throw std::invalid_argument("IRS element count must be non-negative");
    if (element_width < 0.0 || !std::isfinite(element_width))
      throw std::invalid_argument("IRS element width must be non-negative");
  }
};

enum class Architecture { bistatic, monostatic };

inline std::string to_string(Architecture a) {
  return a == Architecture::bistatic ? "bistatic" : "monostatic";
}

struct SystemLayout {
  Position2D ce_position{0.0, 0.0};
  Position2D reader_position{100.0, 0.0};
  Position2D tag_position{50.0, 0.0};
  IrsGeometry irs{};
  double wavelength = kSpeedOfLight / 915e6;
  int ce_antennas = 4;
  Architecture architecture = Architecture::bistatic;

  double element_width() const { return irs.element_width > 0.0 ? irs.element_width : wavelength; }

  void validate() const {
    irs.validate();
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
      throw std::invalid_argument("wavelength must be positive");
    if (ce_antennas < 1) throw std::invalid_argument("CE needs at least one antenna");
    if (!ce_position.finite() || !reader_position.finite() || !tag_position.finite())
      throw std::invalid_argument("node positions must be finite");
    if (architecture == Architecture::monostatic) {
      if (!(ce_position == reader_position))
        throw std::invalid_argument("monostatic layout requires the CE at the reader position");
      if (ce_antennas != 1) throw std::invalid_argument("monostatic layout uses a single-antenna reader");
    }
  }
};

/// Amplitude path-loss model. The built-in stand-ins can be replaced by
/// assigning the two hooks, e.g. with a near/far-field IRS formula.
struct PathLossModel {
  double exponent = 2.1;
  // amplitude(distance, wavelength)
  std::function<double(double, double)> direct_override;
  // amplitude(distance, obliquity_cos, element_width, wavelength) for one
  // node-to-element hop
  std::function<double(double, double, double, double)> irs_hop_override;

  bool user_supplied() const { return static_cast<bool>(direct_override) || static_cast<bool>(irs_hop_override); }
};

inline void require_positive_distance(double d, const char* what) {
  if (!(d > 0.0) || !std::isfinite(d))
    throw std::domain_error(std::string(what) + ": distance must be positive and finite");
}

/// Direct-link amplitude (lambda / 4pi) * d^(-exponent/2).
inline double path_loss_direct(double d, const PathLossModel& model, double wavelength) {
  require_positive_distance(d, "path_loss_direct");
  if (model.direct_override) return model.direct_override(d, wavelength);
  return wavelength / (4.0 * kPi) * std::pow(d, -model.exponent / 2.0);
}

/// Single hop between a node and one IRS element: sqrt(A_e * cos / 4pi) / d,
/// with aperture A_e = width^2. Two hops multiply to the plate-scattering
/// cascade A_e sqrt(cos_in cos_out) / (4pi d_in d_out).
inline double path_loss_irs_hop(double d, double obliquity_cos, double element_width,
                                const PathLossModel& model, double wavelength) {
  require_positive_distance(d, "path_loss_irs_hop");
  const double c = std::clamp(obliquity_cos, 0.0, 1.0);
  if (model.irs_hop_override) return model.irs_hop_override(d, c, element_width, wavelength);
  const double aperture = element_width * element_width;
  return std::sqrt(aperture * c / (4.0 * kPi)) / d;
}

/// Cascaded node-element-node amplitude for one IRS element.
inline double path_loss_irs_element(double d_in, double d_out, double incidence_cos,
                                    double departure_cos, const PathLossModel& model,
                                    double wavelength, double element_width) {
  return path_loss_irs_hop(d_in, incidence_cos, element_width, model, wavelength) *
         path_loss_irs_hop(d_out, departure_cos, element_width, model, wavelength);
}

inline std::vector<Position2D> element_positions(const IrsGeometry& irs, double element_width) {
  const int n = irs.element_count;
  if (n <= 0) return {};
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12));
  const int rows = (n + cols - 1) / cols;
  const Position2D normal = irs.orientation;
  const Position2D tangent{-normal.y, normal.x};
  std::vector<Position2D> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int r = k / cols;
    const int c = k % cols;
    const double along = (c - 0.5 * (cols - 1)) * element_width;
    const double across = (r - 0.5 * (rows - 1)) * element_width;
    out.push_back(irs.center + along * tangent + across * normal);
  }
  return out;
}

/// Cosine between the element normal and the direction toward `node`,
/// clamped at zero for points behind the surface.
inline double obliquity_cos(Position2D element, Position2D normal, Position2D node) {
  const Position2D d = node - element;
  const double len = d.norm();
  if (len == 0.0) return 0.0;
  return std::max(0.0, normal.dot(d) / len);
}

/// All channel gains with path loss absorbed. `h_ti` is the tag-IRS column;
/// the IRS-to-tag row of the CE-IRS-tag hop is its conjugate transpose.
struct ChannelSet {
  CRow h_ct;  // 1 x L
  CMat h_ci;  // N x L
  CRow h_cr;  // 1 x L, carried for completeness, unused by the optimizer
  CVec h_ti;  // N
  CVec h_ri;  // N
  cd h_tr{0.0, 0.0};
  Architecture architecture = Architecture::bistatic;

  Eigen::Index elements() const { return h_ti.size(); }
  Eigen::Index antennas() const { return h_ct.size(); }

  void validate() const {
    const auto n = elements();
    const auto l = antennas();
    if (l < 1) throw std::invalid_argument("channel set needs at least one CE antenna");
    if (h_ci.rows() != n || h_ci.cols() != l || h_ri.size() != n)
      throw std::invalid_argument("channel set dimension mismatch");
    if (!h_ct.allFinite() || !h_ci.allFinite() || !h_ti.allFinite() || !h_ri.allFinite() ||
        !std::isfinite(h_tr.real()) || !std::isfinite(h_tr.imag()))
      throw std::invalid_argument("channel set has non-finite entries");
  }

  /// Same direct links, IRS removed.
  ChannelSet without_irs() const {
    ChannelSet c;
    c.h_ct = h_ct;
    c.h_cr = h_cr;
    c.h_tr = h_tr;
    c.h_ci = CMat::Zero(0, h_ct.size());
    c.h_ti = CVec::Zero(0);
    c.h_ri = CVec::Zero(0);
    c.architecture = architecture;
    return c;
  }

  /// Same dimensions with every IRS hop zeroed.
  ChannelSet with_zeroed_irs() const {
    ChannelSet c = *this;
    c.h_ci.setZero();
    c.h_ti.setZero();
    c.h_ri.setZero();
    return c;
  }
};

/// Draws one realization: every entry is (path-loss amplitude) * e^{j phi}
/// with phi uniform on [0, 2pi). In monostatic mode only the reader-tag,
/// reader-IRS and tag-IRS gains are drawn; the CE-side quantities follow by
/// reciprocity so that the CE-IRS-tag cascade of every element equals its
/// tag-IRS-reader cascade.
inline ChannelSet synthesize_channels(const SystemLayout& layout, const PathLossModel& model,
                                      std::uint64_t seed) {
  layout.validate();
  const int n = layout.irs.element_count;
  const int l = layout.ce_antennas;
  const double lambda = layout.wavelength;
  const double width = layout.element_width();
  const auto elems = element_positions(layout.irs, width);
  const Position2D normal = layout.irs.orientation;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  auto draw = [&](double amplitude) { return std::polar(amplitude, phase(rng)); };

  auto hop = [&](Position2D elem, Position2D node) {
    return path_loss_irs_hop(distance(elem, node), obliquity_cos(elem, normal, node), width, model,
                             lambda);
  };

  ChannelSet ch;
  ch.architecture = layout.architecture;
  const double d_tr = distance(layout.tag_position, layout.reader_position);
  const double a_tr = path_loss_direct(d_tr, model, lambda);

  if (layout.architecture == Architecture::monostatic) {
    ch.h_tr = draw(a_tr);
    ch.h_ri.resize(n);
    ch.h_ti.resize(n);
    for (int k = 0; k < n; ++k) ch.h_ri(k) = draw(hop(elems[k], layout.reader_position));
    for (int k = 0; k < n; ++k) ch.h_ti(k) = draw(hop(elems[k], layout.tag_position));
    ch.h_ct = CRow::Constant(1, ch.h_tr);
    ch.h_cr = CRow::Zero(1);
    ch.h_ci.resize(n, 1);
    for (int k = 0; k < n; ++k) {
      // conj(h_ti) * h_ci == conj(h_ri) * h_ti, |h_ci| == |h_ri|
      const cd t = ch.h_ti(k);
      const double m = std::abs(t);
      const cd rot = m > 0.0 ? (t / m) * (t / m) : cd(1.0, 0.0);
      ch.h_ci(k, 0) = std::conj(ch.h_ri(k)) * rot;
    }
    return ch;
  }

  const double a_ct = path_loss_direct(distance(layout.tag_position, layout.ce_position), model, lambda);
  const double a_cr =
      path_loss_direct(distance(layout.reader_position, layout.ce_position), model, lambda);
  ch.h_ct.resize(l);
  ch.h_ci.resize(n, l);
  ch.h_cr.resize(l);
  ch.h_ti.resize(n);
  ch.h_ri.resize(n);
  for (int a = 0; a < l; ++a) ch.h_ct(a) = draw(a_ct);
  for (int k = 0; k < n; ++k) {
    const double amp = hop(elems[k], layout.ce_position);
    for (int a = 0; a < l; ++a) ch.h_ci(k, a) = draw(amp);
  }
  for (int a = 0; a < l; ++a) ch.h_cr(a) = draw(a_cr);
  for (int k = 0; k < n; ++k) ch.h_ti(k) = draw(hop(elems[k], layout.tag_position));
  for (int k = 0; k < n; ++k) ch.h_ri(k) = draw(hop(elems[k], layout.reader_position));
  ch.h_tr = draw(a_tr);
  return ch;
}

}  // namespace irsbc
