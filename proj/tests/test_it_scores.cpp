// Copyright 2026 The ait Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "ait/causal.hpp"
#include "ait/it_scores.hpp"

namespace ait {
namespace {

double gamma_q_bits(std::size_t n, double bits_sum) {
  return -std::log2(boost::math::gamma_q(static_cast<double>(n), std::numbers::ln2 * bits_sum));
}

TEST(ItScore, UniformReference) {
  const Reference u = uniform_reference();
  EXPECT_DOUBLE_EQ(it_score(0.75, u).bits, 2.0);
  EXPECT_EQ(it_score(-1.0, u).bits, 0.0);
  EXPECT_FALSE(std::signbit(it_score(-1.0, u).bits));
  EXPECT_TRUE(std::isinf(it_score(2.0, u).bits));
}

TEST(ItScore, EmpiricalIsAddOne) {
  const Reference ref = EmpiricalReference{{1, 2, 3, 4, 5, 6, 7}};
  EXPECT_DOUBLE_EQ(it_score(100.0, ref, "f").bits, 3.0);
  EXPECT_EQ(it_score(100.0, ref, "f").feature_id, "f");
}

TEST(ConditionalItScore, RecordsParentsAndReference) {
  const ConditionalReference cond = [](std::span<const double> pa) -> std::optional<Reference> {
    if (pa.empty()) return std::nullopt;
    return Reference{gaussian_reference(2.0 * pa[0], 1.0)};
  };
  const std::vector<double> pa{1.5};
  const ITScore s = conditional_it_score(3.0, pa, cond);
  EXPECT_TRUE(s.conditional());
  EXPECT_DOUBLE_EQ(s.bits, 1.0);
  EXPECT_EQ(s.parent_context, pa);
  EXPECT_THROW(conditional_it_score(3.0, {}, cond), ContractViolation);
  EXPECT_THROW(conditional_it_score(3.0, pa, ConditionalReference{}), ContractViolation);
}

TEST(JointScore, ReferenceValue) {
  const std::vector<double> b{6.0, 4.0};
  EXPECT_NEAR(joint_convolution_score(b).bits, 7.012411395, 1e-8);
}

TEST(JointScore, SingleScorePassesThrough) {
  const std::vector<double> b{5.25};
  EXPECT_EQ(joint_convolution_score(b).bits, 5.25);
}

TEST(JointScore, MatchesIncompleteGammaOracle) {
  for (std::size_t n : {2u, 3u, 5u, 10u, 40u}) {
    for (double total : {0.01, 0.5, 1.0, 3.0, 7.5, 20.0, 60.0, 200.0}) {
      std::vector<double> b(n, total / static_cast<double>(n));
      const double got = joint_convolution_score(b).bits;
      const double want = gamma_q_bits(n, total);
      EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, want)) << "n=" << n << " total=" << total;
    }
  }
}

TEST(JointScore, DeepTailStaysFinite) {
  const std::vector<double> b{2000.0, 2000.0, 2000.0};
  const double got = joint_convolution_score(b).bits;
  EXPECT_TRUE(std::isfinite(got));
  EXPECT_LT(got, 6000.0);
  EXPECT_GT(got, 5900.0);
}

TEST(JointScore, MonotoneAndBoundedBySum) {
  for (double a = 0.0; a < 30.0; a += 0.25) {
    const std::vector<double> lo{a, 3.0, 1.0};
    const std::vector<double> hi{a + 0.25, 3.0, 1.0};
    const double l = joint_convolution_score(lo).bits;
    EXPECT_LE(l, joint_convolution_score(hi).bits);
    EXPECT_LE(l, a + 4.0);
    EXPECT_GE(l, 0.0);
  }
  const std::vector<double> zeros{0.0, 0.0};
  EXPECT_EQ(joint_convolution_score(zeros).bits, 0.0);
}

TEST(JointScore, RejectsInvalidInput) {
  EXPECT_THROW(joint_convolution_score({}), ContractViolation);
  const std::vector<double> neg{1.0, -0.5};
  EXPECT_THROW(joint_convolution_score(neg), ContractViolation);
  const std::vector<double> nan{1.0, std::nan("")};
  EXPECT_THROW(joint_convolution_score(nan), ContractViolation);
  const std::vector<double> inf{1.0, INFINITY};
  EXPECT_THROW(joint_convolution_score(inf), ContractViolation);
}

// Under the null the joint score is itself an IT score: P(score >= c) = 2^-c.
TEST(JointScore, CalibratedUnderUniformPValues) {
  constexpr int kN = 100000;
  Rng rng(5);
  for (std::size_t n : {2u, 3u}) {
    std::vector<int> hits(3);
    const double cs[] = {1.0, 3.0, 7.0};
    std::vector<double> b(n);
    for (int i = 0; i < kN; ++i) {
      for (auto& v : b) v = -std::log2(1.0 - rng.uniform());
      const double s = joint_convolution_score(b).bits;
      for (int k = 0; k < 3; ++k) hits[k] += s >= cs[k];
    }
    for (int k = 0; k < 3; ++k) {
      const double p = std::exp2(-cs[k]);
      EXPECT_NEAR(hits[k] / double(kN), p, 5 * std::sqrt(p * (1 - p) / kN)) << "n=" << n << " c=" << cs[k];
    }
  }
}

}  // namespace
}  // namespace ait
