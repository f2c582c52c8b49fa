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

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

namespace irsbc {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Wraps an angle into [0, 2*pi).
inline double wrap_phase(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive seed derivation from a list of integer keys.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
inline double hermitian_spectral_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

inline bool is_hermitian(const CMat& a, double rel_tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  if (!a.allFinite()) return false;
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

/// Real part of x^H A x for Hermitian A.
inline double hermitian_form(const CMat& a, const CVec& x) { return (x.adjoint() * (a * x))(0).real(); }

/// Circularly-symmetric complex Gaussian vector with unit variance per entry.
template <class Rng>
CVec complex_gaussian(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CVec z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    z(i) = cd(re, im);
  }
  return z;
}

/// Entrywise projection onto the unit circle; zero entries map to 1.
inline CVec unit_modulus(const CVec& x) {
  CVec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x(i));
    y(i) = m > 0.0 ? x(i) / m : cd(1.0, 0.0);
  }
  return y;
}

/// Rotates x by a common phase so that its last entry is real and positive.
inline CVec rotate_last_to_one(const CVec& x) {
  if (x.size() == 0) return x;
  const cd last = x(x.size() - 1);
  const double m = std::abs(last);
  if (m == 0.0) return x;
  return x * std::conj(last / m);
}

/// Runs body(i) for i in [0, count) on a small pool of worker threads.
/// Each index is visited exactly once; callers write results by index so the
/// outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

}  // namespace irsbc
