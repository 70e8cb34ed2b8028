// Copyright 2026 The ait Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ait/attribution.hpp"

namespace ait {
namespace {

constexpr CompressorId kLz77 = CompressorId::lz77;

Observation chain_obs(const std::vector<std::string>& noise) {
  const CausalModel m = models::digit_chain(static_cast<int>(noise.size()), static_cast<int>(noise[0].size()));
  std::map<std::string, Noise> n;
  for (std::size_t j = 0; j < noise.size(); ++j) n["X" + std::to_string(j + 1)] = noise[j];
  return propagate(m, n);
}

TEST(Mechanisms, DigitNodesUseParentContext) {
  const CausalModel m = models::digit_chain(2, 10);
  const Observation obs = chain_obs({"3141592653", "0000000000"});
  const auto scores = mechanism_deficiencies(m, obs, kLz77);
  ASSERT_EQ(scores.size(), 2u);
  const double neg = 10 * std::log2(10.0);
  EXPECT_NEAR(scores[1].second.neg_log_prob_bits, neg, 1e-12);
  // X2 equals X1, so given X1 it costs a single match.
  EXPECT_EQ(scores[1].second.complexity_bits, 19.0);
  EXPECT_NEAR(scores[1].second.bits, neg - 19.0, 1e-12);
  EXPECT_EQ(scores[0].second.complexity_bits, static_cast<double>(lz77::bits("0.3141592653")));
  EXPECT_EQ(root_cause(scores), "X2");
}

TEST(Mechanisms, OutOfSupportValueIsDataError) {
  const CausalModel m = models::digit_chain(2, 3);
  Observation obs = chain_obs({"500", "100"});
  obs.values["X2"] = std::string("0.100");  // below its parent
  EXPECT_THROW(mechanism_deficiencies(m, obs, kLz77), DataError);
  obs.values["X2"] = std::string("1.600");  // noise would be >= 1
  EXPECT_THROW(mechanism_deficiencies(m, obs, kLz77), DataError);
}

TEST(Mechanisms, GaussianNodesUseResidualZ) {
  const CausalModel m = models::three_node_gaussian();
  const Observation obs = propagate(m, {{"X1", 0.0}, {"X2", 5.0}, {"X3", 0.0}});
  const auto scores = mechanism_deficiencies(m, obs, kLz77);
  EXPECT_NEAR(scores[1].second.bits, 13.389831821, 1e-8);
  EXPECT_EQ(scores[0].second.bits, 0.0);
  EXPECT_EQ(scores[2].second.bits, 0.0);
  EXPECT_EQ(root_cause(scores), "X2");
}

TEST(Mechanisms, DeterministicNodes) {
  const CausalModel m({{"A", {}, UniformDigits{2}}, {"B", {"A"}, Deterministic{"copy", {}}}});
  Observation obs = propagate(m, {{"A", std::string("42")}});
  const auto scores = mechanism_deficiencies(m, obs, kLz77);
  EXPECT_EQ(scores[1].second.bits, 0.0);
  obs.values["B"] = std::string("0.41");
  EXPECT_THROW(mechanism_deficiencies(m, obs, kLz77), DataError);
}

TEST(RootCause, TieBreaks) {
  MechanismScores s{{"A", DeficiencyEstimate::from_terms(10, 20)},
                    {"B", DeficiencyEstimate::from_terms(10, 15)},
                    {"C", DeficiencyEstimate::from_terms(10, 15)}};
  EXPECT_EQ(root_cause(s), "B");
  s.push_back({"D", DeficiencyEstimate::from_terms(10, 9)});
  EXPECT_EQ(root_cause(s), "D");
  EXPECT_THROW(root_cause({}), ContractViolation);
}

TEST(Joint, StringAndGap) {
  const CausalModel m = models::digit_chain(2, 3);
  const Observation obs = chain_obs({"123", "456"});
  EXPECT_EQ(joint_string(m, obs), std::string("0.123\xff" "0.579"));
  const auto j = joint_deficiency_estimate(m, 20.0, obs, kLz77);
  EXPECT_EQ(j.complexity_bits, static_cast<double>(lz77::bits(joint_string(m, obs))));
  const MechanismScores per{{"X1", DeficiencyEstimate::from_terms(5, 1)}, {"X2", DeficiencyEstimate::from_terms(5, 2)}};
  EXPECT_EQ(decomposition_gap(DeficiencyEstimate::from_terms(10, 0), per), 3.0);
}

TEST(Attribute, ChainFindsInjectedNode) {
  const CausalModel m = models::digit_chain(4, 10);
  int correct = 0;
  for (std::uint64_t t = 0; t < 40; ++t) {
    Rng rng(derive_seed(1234, t));
    const Observation base = sample_one(m, rng);
    const std::string target = "X" + std::to_string(1 + rng.below(4));
    const Observation obs = inject_anomaly(m, base, target, OneDigitNoise{static_cast<int>(rng.below(10))});
    correct += attribute(m, obs, kLz77).root_cause == target;
  }
  EXPECT_GE(correct, 38);
}

TEST(Attribute, XorGapAndZeroMechanism) {
  Rng rng(8);
  const std::string x0 = rng.bit_string(512);
  const CausalModel m = models::xor_pair(x0);
  const AttributionReport at = attribute(m, propagate(m, {{"X", x0}}), kLz77, 8);
  EXPECT_EQ(at.per_node[1].second.bits, 0.0);
  EXPECT_EQ(at.per_node[0].second.bits, 0.0);
  EXPECT_GT(at.decomposition_gap_bits, 256.0);
  const AttributionReport fresh = attribute(m, propagate(m, {{"X", rng.bit_string(512)}}), kLz77, 8);
  EXPECT_EQ(fresh.decomposition_gap_bits, 0.0);
  EXPECT_EQ(fresh.seed, 8u);
}

TEST(Attribute, GaussianJointIsMahalanobis) {
  const CausalModel m = models::three_node_gaussian();
  const Observation obs = propagate(m, {{"X1", 0.0}, {"X2", 5.0}, {"X3", 0.0}});
  const AttributionReport r = attribute(m, obs, kLz77);
  // x^T Sigma^{-1} x = 25 and the summed offset costs are 2 + 2 log2 5 + 2.
  const double want = 0.5 * std::numbers::log2e * 25.0 - (4.0 + 2.0 * std::log2(5.0));
  EXPECT_NEAR(r.joint_estimate_bits, want, 1e-9);
  EXPECT_NEAR(r.decomposition_gap_bits, want - 13.389831821, 1e-8);
}

TEST(Attribute, MixedModelRejected) {
  const CausalModel m({{"G", {}, LinearGaussian{{}, 1.0}}, {"D", {}, UniformDigits{2}}});
  const Observation obs = propagate(m, {{"G", 0.5}, {"D", std::string("12")}});
  EXPECT_THROW(attribute(m, obs, kLz77), ModelError);
}

TEST(Attribute, JsonShape) {
  const CausalModel m = models::digit_chain(2, 3);
  const auto j = to_json(attribute(m, chain_obs({"123", "000"}), CompressorId::lz78, 3));
  EXPECT_EQ(j.at("root_cause"), "X2");
  EXPECT_EQ(j.at("compressor"), "lz78");
  EXPECT_EQ(j.at("seed"), 3);
  EXPECT_TRUE(j.at("per_node").contains("X1"));
  EXPECT_TRUE(j.at("per_node").at("X2").contains("complexity_bits"));
}

}  // namespace
}  // namespace ait
