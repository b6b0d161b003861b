/*
 Copyright 2026 The delayh2 Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <cmath>

#include <gtest/gtest.h>

#include "delayh2/errors.hpp"
#include "delayh2/synthesis.hpp"
#include "delayh2/verify.hpp"
#include "test_support.hpp"

namespace delayh2 {
namespace {

using testing::Rng;
using testing::Series;

ConstraintSpace chain_space() {
  return constraint_space(delay_matrix(testing::chain_graph()), {1, 1, 1}, {1, 1, 1});
}

StateSpaceModel central_controller(const GeneralizedPlant& p) {
  const auto f = coprime_factorization(p, riccati_gains(p));
  return multiply(f.y_hat, inverse(f.x_hat));
}

// G11 + G12 K (I - G22 K)^{-1} G21 on truncated series.
Series lft_series(const GeneralizedPlant& p, const StateSpaceModel& k, int horizon) {
  const auto g11 = testing::markov(p.g11(), horizon);
  const auto g12 = testing::markov(StateSpaceModel(p.a, p.b2, p.c1, p.d12), horizon);
  const auto g21 = testing::markov(StateSpaceModel(p.a, p.b1, p.c2, p.d21), horizon);
  const auto loop = testing::convolve(testing::markov(p.g22(), horizon), testing::markov(k, horizon));
  const auto q2 = p.measurements();
  Series s(static_cast<std::size_t>(horizon + 1), Matrix::Zero(q2, q2));
  s[0] = Matrix::Identity(q2, q2);
  for (int t = 1; t <= horizon; ++t) {
    for (int i = 1; i <= t; ++i) s[t] += loop[i] * s[t - i];
  }
  const auto k_series = testing::markov(k, horizon);
  const auto tail = testing::convolve(testing::convolve(testing::convolve(g12, k_series), s), g21);
  return testing::add(g11, tail);
}

TEST(ClosedLoop, ZeroControllerLeavesOpenLoop) {
  auto p = testing::chain_plant();
  p.a *= 0.3;  // make G11 stable
  const auto cl = closed_loop(p, StateSpaceModel::zero(3, 3));
  EXPECT_EQ(cl.model.states(), 3);
  EXPECT_DOUBLE_EQ(h2_norm_sq(cl.model), h2_norm_sq(p.g11()));
}

TEST(ClosedLoop, RejectsFeedthrough) {
  EXPECT_THROW(closed_loop(testing::chain_plant(), StateSpaceModel::gain(Matrix::Identity(3, 3))),
               IllPosed);
}

TEST(ClosedLoop, RejectsWrongShape) {
  EXPECT_THROW(closed_loop(testing::chain_plant(), StateSpaceModel::zero(2, 3)),
               DimensionMismatch);
}

TEST(ClosedLoop, MatchesLinearFractionalSeries) {
  Rng rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testing::random_plant(rng, 3, {1, 1}, {2, 1});
    const auto k = testing::random_stable(rng, 2, 2, 3, 0.5);
    const StateSpaceModel sp(k.a(), 0.3 * k.b(), k.c(), Matrix::Zero(2, 3));
    const auto cl = closed_loop(p, sp);
    EXPECT_EQ(cl.model.states(), p.states() + sp.states());
    const auto direct = testing::markov(cl.model, 12);
    const auto oracle = lft_series(p, sp, 12);
    for (int t = 0; t <= 12; ++t) {
      EXPECT_LT((direct[t] - oracle[t]).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + oracle[t].norm()));
    }
  }
}

TEST(ClosedLoop, CentralControllerOnChain) {
  const auto cl = closed_loop(testing::chain_plant(), central_controller(testing::chain_plant()));
  EXPECT_TRUE(cl.internally_stable());
  EXPECT_NEAR(std::sqrt(h2_norm_sq(cl.model)), 24.236, 1e-2);
}

TEST(ClosedLoop, SynthesizedChainController) {
  const auto p = testing::chain_plant();
  const auto r = synthesize(p, chain_space());
  const auto cl = closed_loop(p, r.controller);
  EXPECT_TRUE(cl.internally_stable());
  EXPECT_NEAR(std::sqrt(h2_norm_sq(cl.model)), 34.9304, 1e-3);
  EXPECT_NEAR(h2_norm_sq(cl.model), r.total_norm_sq, 1e-5 * r.total_norm_sq);
}

TEST(Conformance, ZeroControllerConforms) {
  const auto report = conformance(StateSpaceModel::zero(3, 3), chain_space());
  EXPECT_TRUE(report.conforms);
  EXPECT_EQ(report.summary(), "conforms");
}

TEST(Conformance, CentralControllerViolatesChain) {
  const auto report = conformance(central_controller(testing::chain_plant()), chain_space());
  EXPECT_FALSE(report.conforms);
  bool lag1_offdiag = false;
  for (const auto& v : report.violations) {
    if (v.lag == 1 && v.block_row != v.block_col) lag1_offdiag = true;
  }
  EXPECT_TRUE(lag1_offdiag);
  EXPECT_NE(report.summary().find("violation"), std::string::npos);
}

TEST(Conformance, FeedthroughIsAViolation) {
  const auto report = conformance(StateSpaceModel::gain(Matrix::Identity(3, 3)), chain_space());
  EXPECT_FALSE(report.conforms);
  EXPECT_EQ(report.violations.front().lag, 0);
}

TEST(Conformance, ShiftRegisterRespectsPattern) {
  // A pure FIR controller with coefficients placed exactly on the pattern.
  const auto cs = chain_space();
  Matrix a = Matrix::Zero(6, 6);
  a.block(3, 0, 3, 3).setIdentity();
  Matrix b = Matrix::Zero(6, 3);
  b.topRows(3).setIdentity();
  Matrix c(3, 6);
  Matrix k1 = Matrix::Identity(3, 3);
  Matrix k2(3, 3);
  k2 << 1, 2, 0, 3, 4, 5, 0, 6, 7;
  c << k1, k2;
  EXPECT_TRUE(conformance(StateSpaceModel(a, b, c, Matrix::Zero(3, 3)), cs).conforms);
  k2(0, 2) = 1e-3;
  c << k1, k2;
  const auto bad = conformance(StateSpaceModel(a, b, c, Matrix::Zero(3, 3)), cs);
  ASSERT_FALSE(bad.conforms);
  EXPECT_EQ(bad.violations.size(), 1u);
  EXPECT_EQ(bad.violations[0].lag, 2);
  EXPECT_EQ(bad.violations[0].block_row, 0);
  EXPECT_EQ(bad.violations[0].block_col, 2);
}

TEST(KktOracle, UnconstrainedIsZero) {
  const auto p = testing::chain_plant();
  const auto g = riccati_gains(p);
  const auto cs = ConstraintSpace::repeated({1, 1, 1}, {1, 1, 1}, BoolMatrix::Constant(3, 3, true), 2);
  const auto sol = kkt_oracle(vectorized_system(p, g), cs, g.omega, g.psi);
  EXPECT_NEAR(sol.cost, 0.0, 1e-12);
  for (const auto& blk : sol.v_star.blocks) EXPECT_LT(blk.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KktOracle, ChainCostIdentity) {
  const auto p = testing::chain_plant();
  const auto g = riccati_gains(p);
  const double p11 = h2_norm_sq(model_matching_matrices(p, g).p11);
  const auto sol = kkt_oracle(vectorized_system(p, g), chain_space(), g.omega, g.psi);
  EXPECT_NEAR(sol.cost, 34.9304 * 34.9304 - p11, 2 * 34.9304 * 1e-3);
}

TEST(KktOracle, AgreesWithRecursionOnRandomInstances) {
  Rng rng(89);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = testing::random_instance(rng, trial % 2 == 0);
    const auto g = riccati_gains(inst.plant);
    const auto vs = vectorized_system(inst.plant, g);
    const auto fast = solve_constrained_qp(vs, inst.cs, g.omega, g.psi);
    const auto slow = kkt_oracle(vs, inst.cs, g.omega, g.psi);
    EXPECT_LT(testing::max_abs_diff(fast.v_star, slow.v_star), 1e-7) << "trial " << trial;
    EXPECT_LT(testing::rel_diff(fast.cost, slow.cost), 1e-9) << "trial " << trial;
  }
}

TEST(EndToEnd, RandomInstancesSatisfyAllChecks) {
  Rng rng(97);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = testing::random_instance(rng, trial % 2 == 1);
    const auto r = synthesize(inst.plant, inst.cs);
    EXPECT_EQ(r.controller.states(),
              inst.plant.states() + inst.plant.measurements() * inst.cs.horizon());
    const auto cl = closed_loop(inst.plant, r.controller);
    ASSERT_TRUE(cl.internally_stable()) << "trial " << trial;
    EXPECT_LT(testing::rel_diff(h2_norm_sq(cl.model), r.total_norm_sq), 1e-5) << "trial " << trial;
    EXPECT_TRUE(conformance(r.controller, inst.cs).conforms) << "trial " << trial;
  }
}

}  // namespace
}  // namespace delayh2
