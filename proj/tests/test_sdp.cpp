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

#include "test_util.hpp"

using namespace irsbc;
using namespace irsbc::testing;

namespace {

SolverConfig with(SdpMethod m) {
  SolverConfig c;
  c.method = m;
  return c;
}

void expect_feasible(const CMat& v, double tol) {
  for (Eigen::Index i = 0; i < v.rows(); ++i) EXPECT_NEAR(std::abs(v(i, i) - cd(1.0, 0.0)), 0.0, tol);
  EXPECT_LT((v - v.adjoint()).norm(), tol * v.rows());
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (v + v.adjoint()));
  EXPECT_GT(es.eigenvalues().minCoeff(), -tol * v.rows());
}

class BothMethods : public ::testing::TestWithParam<SdpMethod> {};

TEST_P(BothMethods, FeasibleOutput) {
  std::mt19937_64 rng(1);
  for (int m : {2, 5, 12}) {
    const CMat u = random_hermitian(m, rng);
    const auto sol = solve_diag_sdp({u}, with(GetParam()));
    EXPECT_TRUE(sol.converged);
    expect_feasible(sol.v, 1e-7);
    EXPECT_LT(rel_err(sol.objective, (u * sol.v).trace().real()), 1e-12);
  }
}

TEST_P(BothMethods, RankOneCostHasClosedForm) {
  // max tr(a a^H V) over unit-diagonal V is (sum |a_i|)^2, attained at x = phase(a)
  std::mt19937_64 rng(2);
  const CVec a = complex_gaussian(9, rng);
  const auto sol = solve_diag_sdp({a * a.adjoint()}, with(GetParam()));
  EXPECT_LT(rel_err(sol.objective, std::pow(a.cwiseAbs().sum(), 2)), 1e-6);
  const CMat x = unit_modulus(a);
  EXPECT_LT((sol.v - x * x.adjoint()).norm() / 9.0, 1e-3);
}

TEST_P(BothMethods, RelaxationDominatesUnitModulusPoints) {
  std::mt19937_64 rng(3);
  const CMat u = random_hermitian(8, rng);
  const auto sol = solve_diag_sdp({u}, with(GetParam()));
  for (int t = 0; t < 500; ++t) EXPECT_LE(hermitian_form(u, random_unit_homogeneous(8, rng)), sol.objective + 1e-9);
  // and is bounded by m * lambda_max
  Eigen::SelfAdjointEigenSolver<CMat> es(u);
  EXPECT_LE(sol.objective, 8.0 * es.eigenvalues().maxCoeff() + 1e-9);
}

TEST_P(BothMethods, ScaleEquivariant) {
  std::mt19937_64 rng(4);
  const CMat u = random_hermitian(6, rng);
  const auto a = solve_diag_sdp({u}, with(GetParam()));
  const auto b = solve_diag_sdp({CMat(1e-12 * u)}, with(GetParam()));
  EXPECT_LT(rel_err(1e-12 * a.objective, b.objective), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Sdp, BothMethods, ::testing::Values(SdpMethod::low_rank, SdpMethod::interior_point));

TEST(Sdp, LowRankMatchesInteriorPoint) {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 15; ++s) {
    const int m = 3 + s;
    const CMat u = random_hermitian(m, rng);
    const auto lr = solve_diag_sdp({u}, with(SdpMethod::low_rank));
    const auto ip = solve_diag_sdp({u}, with(SdpMethod::interior_point));
    EXPECT_LT(std::abs(lr.objective - ip.objective), 1e-5 * std::abs(ip.objective) + 1e-8) << "m=" << m;
  }
}

TEST(Sdp, WarmStartReachesSameOptimum) {
  std::mt19937_64 rng(6);
  const CMat u = random_hermitian(10, rng);
  const auto cold = solve_diag_sdp({u}, {});
  const auto warm = solve_diag_sdp({u}, {}, CVec(random_unit_homogeneous(10, rng)));
  EXPECT_LT(rel_err(cold.objective, warm.objective), 1e-6);
  // a wrong-sized warm start is ignored
  const auto ignored = solve_diag_sdp({u}, {}, CVec::Ones(3));
  EXPECT_LT(rel_err(cold.objective, ignored.objective), 1e-6);
}

TEST(Sdp, ZeroCost) {
  const auto sol = solve_diag_sdp({CMat::Zero(4, 4)}, {});
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.objective, 0.0);
  expect_feasible(sol.v, 1e-14);
}

TEST(Sdp, RejectsBadInput) {
  CMat u = CMat::Identity(3, 3);
  u(0, 1) = cd(0.0, 1.0);
  EXPECT_THROW(solve_diag_sdp({u}, {}), std::domain_error);
  EXPECT_THROW(solve_diag_sdp({CMat::Zero(3, 2)}, {}), std::invalid_argument);
  EXPECT_THROW(solve_diag_sdp({CMat(0, 0)}, {}), std::invalid_argument);
}

TEST(Sdp, Deterministic) {
  std::mt19937_64 rng(7);
  const CMat u = random_hermitian(7, rng);
  const auto a = solve_diag_sdp({u}, {});
  const auto b = solve_diag_sdp({u}, {});
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_TRUE(a.v == b.v);
}

TEST(PsdProject, ProducesFeasiblePoint) {
  std::mt19937_64 rng(8);
  const CMat p = psd_project(random_hermitian(6, rng));
  expect_feasible(p, 1e-10);
}

TEST(Randomization, CandidatesAreHomogeneousUnitModulus) {
  std::mt19937_64 rng(9);
  const CMat u = random_hermitian(6, rng);
  for (SdpMethod m : {SdpMethod::low_rank, SdpMethod::interior_point}) {
    const auto sol = solve_diag_sdp({u}, with(m));
    const auto r = gaussian_randomize(sol, u, 50, 11);
    ASSERT_EQ(r.best.size(), 6);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(std::abs(r.best(i)), 1.0, 1e-14);
    EXPECT_EQ(r.best(5), cd(1.0, 0.0));
    EXPECT_LT(rel_err(r.value, hermitian_form(u, r.best)), 1e-12);
    EXPECT_LE(r.value, sol.objective * (1 + 1e-9) + 1e-12) << "method " << static_cast<int>(m) << " excess " << (r.value - sol.objective) / sol.objective;
    EXPECT_GE(r.best_index, 0);
    EXPECT_LT(r.best_index, 50);
  }
}

TEST(Randomization, RankOneSolutionRecoveredExactly) {
  std::mt19937_64 rng(10);
  const CVec a = complex_gaussian(7, rng);
  const CMat u = a * a.adjoint();
  const auto sol = solve_diag_sdp({u}, {});
  const auto r = gaussian_randomize(sol, u, 5, 3);
  EXPECT_LT(rel_err(r.value, sol.objective), 1e-6);
}

TEST(Randomization, SeedDeterminismAndExtras) {
  std::mt19937_64 rng(12);
  const CMat u = random_hermitian(9, rng);
  const auto sol = solve_diag_sdp({u}, with(SdpMethod::interior_point));
  const auto a = gaussian_randomize(sol, u, 20, 99);
  const auto b = gaussian_randomize(sol, u, 20, 99);
  EXPECT_TRUE(a.best == b.best);
  EXPECT_EQ(a.best_index, b.best_index);
  // an extra candidate that beats every sample is selected and reported after the samples
  const auto polished = gaussian_randomize(sol, u, 20, 99, std::span<const CVec>(&a.best, 1));
  EXPECT_GE(polished.value, a.value);
  const CVec neg = -a.best;  // same point after rotation: ties go to the earlier sample
  const auto tie = gaussian_randomize(sol, u, 20, 99, std::span<const CVec>(&neg, 1));
  EXPECT_EQ(tie.best_index, a.best_index);
  EXPECT_THROW(gaussian_randomize(sol, u, 0, 1), std::invalid_argument);
  EXPECT_THROW(gaussian_randomize(sol, CMat::Identity(3, 3), 5, 1), std::invalid_argument);
}

}  // namespace
