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

// Complex SDP with unit-diagonal constraint:
//
//   max tr(U V)  s.t.  V_nn = 1, V >= 0
//
// plus Gaussian randomization back to unit-modulus vectors.

#pragma once

#include "irsbc/common.hpp"

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

namespace irsbc {

enum class SdpMethod { low_rank, interior_point };

struct SolverConfig {
  SdpMethod method = SdpMethod::low_rank;
  int factor_rank = 0;  // 0: ceil(sqrt(2M))
  int max_iterations = 5000;
  double stationarity_tolerance = 1e-7;
  int randomization_count = 100;
  std::uint64_t rng_seed = 1;
  bool certify = true;  // low-rank: check the dual certificate, escape saddles
  double warm_start_spread = 0.0;  // random spread mixed into a warm-started factor
};

struct SdpProblem {
  CMat cost;  // Hermitian M x M

  Eigen::Index dimension() const { return cost.rows(); }
};

struct SdpSolution {
  CMat v;               // M x M, unit diagonal, PSD
  CMat factor;          // low-rank factor Y with V = Y Y^H; empty for interior point
  double objective = 0.0;
  int solver_iterations = 0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
};

inline int default_factor_rank(Eigen::Index m) {
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(2.0 * static_cast<double>(m)))));
}

namespace detail {

inline void normalize_rows(CMat& y) {
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double nrm = y.row(i).norm();
    if (nrm > 0.0) {
      y.row(i) /= nrm;
    } else {
      y.row(i).setZero();
      y(i, 0) = 1.0;
    }
  }
}

inline double factor_objective(const CMat& c, const CMat& y) {
  return (y.adjoint() * c * y).trace().real();
}

/// Burer-Monteiro ascent on the product of unit spheres (rows of Y), with
/// Barzilai-Borwein steps and an Armijo safeguard.
inline SdpSolution solve_low_rank(const CMat& c, const SolverConfig& cfg,
                                  const std::optional<CVec>& warm_start) {
  const Eigen::Index m = c.rows();
  const int rank = cfg.factor_rank > 0 ? cfg.factor_rank : default_factor_rank(m);
  std::mt19937_64 rng(derive_seed({cfg.rng_seed, 0x5d9ULL}));

  CMat y(m, rank);
  for (Eigen::Index j = 0; j < rank; ++j) y.col(j) = complex_gaussian(m, rng);
  if (warm_start && warm_start->size() == m) {
    y *= cfg.warm_start_spread;
    y.col(0) += unit_modulus(*warm_start);
  }
  normalize_rows(y);

  auto riemannian_grad = [&](const CMat& yy, const CMat& cy) {
    CMat g = 2.0 * cy;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double radial = (yy.row(i).conjugate().cwiseProduct(g.row(i))).sum().real();
      g.row(i) -= radial * yy.row(i);
    }
    return g;
  };

  CMat cy = c * y;
  double f = (y.adjoint() * cy).trace().real();
  CMat g = riemannian_grad(y, cy);
  double step = 0.5;
  CMat y_prev, g_prev;
  SdpSolution sol;
  int escapes = 0;
  int it = 0;
  double residual = g.norm();
  for (; it < cfg.max_iterations; ++it) {
    residual = g.norm();
    if (residual <= cfg.stationarity_tolerance) {
      if (!cfg.certify) break;
      // Dual certificate: Z = Diag(lambda) - C must be PSD at a global optimum.
      RVec lambda(m);
      for (Eigen::Index i = 0; i < m; ++i)
        lambda(i) = (y.row(i).conjugate().cwiseProduct(cy.row(i))).sum().real();
      CMat z = -c;
      z.diagonal() += lambda.cast<cd>();
      Eigen::SelfAdjointEigenSolver<CMat> es(z);
      const double min_eig = es.eigenvalues()(0);
      if (min_eig >= -std::sqrt(cfg.stationarity_tolerance) * 1e-2 || escapes >= 8) break;
      // Saddle point: push along the violating direction.
      ++escapes;
      const CVec u = es.eigenvectors().col(0);
      const CVec zdir = complex_gaussian(rank, rng);
      y += 0.2 * u * zdir.transpose();
      normalize_rows(y);
      cy = c * y;
      f = (y.adjoint() * cy).trace().real();
      g = riemannian_grad(y, cy);
      y_prev.resize(0, 0);
      step = 0.5;
      continue;
    }
    if (y_prev.size() != 0) {
      const CMat sdiff = y - y_prev;
      const CMat gdiff = g - g_prev;
      const double sg = (sdiff.conjugate().cwiseProduct(gdiff)).sum().real();
      const double ss = sdiff.squaredNorm();
      if (sg < 0.0 && ss > 0.0) step = std::clamp(ss / -sg, 1e-6, 1e3);
      else step = std::min(step * 2.0, 1e3);
    }
    const double gg = g.squaredNorm();
    CMat y_new, cy_new;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      y_new = y + step * g;
      normalize_rows(y_new);
      cy_new = c * y_new;
      f_new = (y_new.adjoint() * cy_new).trace().real();
      if (f_new >= f + 1e-4 * step * gg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further ascent is numerically possible
    y_prev = std::move(y);
    g_prev = std::move(g);
    y = std::move(y_new);
    cy = std::move(cy_new);
    f = f_new;
    g = riemannian_grad(y, cy);
  }
  residual = g.norm();

  RVec lambda(m);
  for (Eigen::Index i = 0; i < m; ++i)
    lambda(i) = (y.row(i).conjugate().cwiseProduct(cy.row(i))).sum().real();
  double dual_violation = 0.0;
  if (cfg.certify) {
    CMat z = -c;
    z.diagonal() += lambda.cast<cd>();
    dual_violation = std::max(0.0, -Eigen::SelfAdjointEigenSolver<CMat>(z, Eigen::EigenvaluesOnly)
                                        .eigenvalues()(0));
  }

  sol.factor = y;
  sol.v = y * y.adjoint();
  sol.objective = f;
  sol.solver_iterations = it;
  sol.kkt_residual = std::max(residual, dual_violation);
  sol.converged = residual <= cfg.stationarity_tolerance * 10.0 &&
                  dual_violation <= std::sqrt(cfg.stationarity_tolerance);
  return sol;
}

/// Largest step a in (0, 1] keeping X + a dX positive definite (times 0.95).
inline double max_pd_step(const CMat& x, const CMat& dx) {
  Eigen::LLT<CMat> llt(x);
  const CMat linv = llt.matrixL().solve(CMat::Identity(x.rows(), x.cols()));
  CMat w = linv * dx * linv.adjoint();
  w = 0.5 * (w + w.adjoint()).eval();
  const double lmin = Eigen::SelfAdjointEigenSolver<CMat>(w, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, 0.95 / -lmin);
}

/// Primal-dual path following with the HKM direction.
///   primal: max tr(C X), diag(X) = 1, X >= 0
///   dual:   min 1^T y,  Z = Diag(y) - C >= 0
inline SdpSolution solve_interior_point(const CMat& c, const SolverConfig& cfg) {
  const Eigen::Index m = c.rows();
  CMat x = CMat::Identity(m, m);
  RVec y(m);
  for (Eigen::Index i = 0; i < m; ++i) y(i) = c.row(i).cwiseAbs().sum() + 1.0;
  CMat z = -c;
  z.diagonal() += y.cast<cd>();

  // This is the reference method, so its duality gap is never looser than 1e-9.
  const double tol = std::clamp(cfg.stationarity_tolerance, 1e-13, 1e-9);
  SdpSolution sol;
  int it = 0;
  double gap = (z * x).trace().real();
  for (; it < std::min(cfg.max_iterations, 500); ++it) {
    const double primal = (c * x).trace().real();
    gap = (z * x).trace().real();
    if (gap <= tol * (1.0 + std::abs(primal))) break;
    const double mu = gap / (2.0 * static_cast<double>(m));

    Eigen::LLT<CMat> zllt(z);
    const CMat zi = zllt.solve(CMat::Identity(m, m));
    const RMat schur = zi.cwiseProduct(x.conjugate()).real();
    const RVec rhs = mu * zi.diagonal().real() - RVec::Ones(m);
    const RVec dy = schur.ldlt().solve(rhs);

    CMat dx = mu * zi - x - zi * dy.cast<cd>().asDiagonal() * x;
    dx = 0.5 * (dx + dx.adjoint()).eval();
    CMat dz = CMat::Zero(m, m);
    dz.diagonal() = dy.cast<cd>();

    const double ap = max_pd_step(x, dx);
    const double ad = max_pd_step(z, dz);
    x += ap * dx;
    x = 0.5 * (x + x.adjoint()).eval();
    y += ad * dy;
    z = -c;
    z.diagonal() += y.cast<cd>();
  }
  // diag(X) drifts only by roundoff; pin it.
  for (Eigen::Index i = 0; i < m; ++i) x(i, i) = 1.0;
  gap = (z * x).trace().real();
  sol.v = x;
  sol.objective = (c * x).trace().real();
  sol.solver_iterations = it;
  sol.kkt_residual = gap / (1.0 + std::abs(sol.objective));
  sol.converged = sol.kkt_residual <= tol * 10.0;
  return sol;
}

}  // namespace detail

/// Solves the unit-diagonal SDP. The cost is normalized internally; the
/// returned objective is tr(U V) in the caller's scale. A solution with
/// converged == false is the best iterate reached.
inline SdpSolution solve_diag_sdp(const SdpProblem& problem, const SolverConfig& config,
                                  const std::optional<CVec>& warm_start = std::nullopt) {
  const CMat& u = problem.cost;
  if (u.rows() != u.cols() || u.rows() == 0) throw std::invalid_argument("SDP cost must be square");
  if (!is_hermitian(u)) throw std::domain_error("SDP cost matrix must be Hermitian");
  const Eigen::Index m = u.rows();

  const double scale = u.norm();
  if (scale == 0.0) {
    SdpSolution sol;
    // every feasible V is optimal; return the all-ones rank-one point
    sol.factor = CMat::Ones(m, 1);
    sol.v = sol.factor * sol.factor.adjoint();
    sol.objective = 0.0;
    sol.kkt_residual = 0.0;
    sol.converged = true;
    return sol;
  }
  const CMat c = 0.5 * (u + u.adjoint()) / scale;

  SdpSolution sol = config.method == SdpMethod::low_rank ? detail::solve_low_rank(c, config, warm_start)
                                                         : detail::solve_interior_point(c, config);
  sol.objective = (u * sol.v).trace().real();
  return sol;
}

/// Eigenvalue clamp at zero, then rescale to unit diagonal.
inline CMat psd_project(const CMat& v) {
  const CMat h = 0.5 * (v + v.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  const RVec ev = es.eigenvalues().cwiseMax(0.0);
  CMat p = es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
  RVec d(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double di = p(i, i).real();
    d(i) = di > 0.0 ? 1.0 / std::sqrt(di) : 0.0;
  }
  p = d.cast<cd>().asDiagonal() * p * d.cast<cd>().asDiagonal();
  for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, i) = 1.0;
  return 0.5 * (p + p.adjoint());
}

struct RandomizationResult {
  CVec best;          // unit modulus, last entry exactly 1
  double value = -std::numeric_limits<double>::infinity();  // best^H U best
  int best_index = -1;  // sample index; indices >= count refer to extra candidates
};

namespace detail {

inline CVec finalize_candidate(const CVec& sample) {
  CVec x = rotate_last_to_one(unit_modulus(sample));
  x(x.size() - 1) = 1.0;
  return x;
}

}  // namespace detail

/// Draws `count` complex Gaussian vectors with covariance V, projects each
/// to unit modulus with last entry 1, and keeps the one maximizing x^H U x.
/// `extra` candidates are scored after the samples; earlier entries win ties.
/// When the solution carries its factor Y (V = Y Y^H), samples are Y z;
/// otherwise V is eigen-factorized with eigenvalues below 1e-10 clamped.
inline RandomizationResult gaussian_randomize(const SdpSolution& sol, const CMat& u, int count,
                                              std::uint64_t seed, std::span<const CVec> extra = {}) {
  const Eigen::Index m = u.rows();
  if (sol.v.rows() != m) throw std::invalid_argument("gaussian_randomize: dimension mismatch");
  if (count < 1) throw std::invalid_argument("gaussian_randomize: count must be >= 1");
  CMat root;
  if (sol.factor.rows() == m && sol.factor.cols() > 0) {
    root = sol.factor;
  } else {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (sol.v + sol.v.adjoint()));
    RVec ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) < 1e-10 ? 0.0 : std::sqrt(ev(i));
    root = es.eigenvectors() * ev.cast<cd>().asDiagonal();
  }

  std::mt19937_64 rng(seed);
  RandomizationResult out;
  for (int g = 0; g < count; ++g) {
    const CVec z = complex_gaussian(root.cols(), rng);
    const CVec x = detail::finalize_candidate(root * z);
    const double val = hermitian_form(u, x);
    if (val > out.value) {
      out.value = val;
      out.best = x;
      out.best_index = g;
    }
  }
  for (std::size_t k = 0; k < extra.size(); ++k) {
    const CVec x = detail::finalize_candidate(extra[k]);
    const double val = hermitian_form(u, x);
    if (val > out.value) {
      out.value = val;
      out.best = x;
      out.best_index = count + static_cast<int>(k);
    }
  }
  return out;
}

}  // namespace irsbc
