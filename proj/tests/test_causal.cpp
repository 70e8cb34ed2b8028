// Copyright 2026 The ait Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ait/causal.hpp"
#include "ait/experiments.hpp"

namespace ait {
namespace {

NodeSpec root_digits(std::string id, int d) { return {std::move(id), {}, UniformDigits{d}}; }

TEST(Decimal, AddAndSubtract) {
  EXPECT_EQ(decimal::add("0.999", "0.001"), "1.000");
  EXPECT_EQ(decimal::add("3.250", "0.875"), "4.125");
  EXPECT_EQ(decimal::subtract("4.125", "0.875"), "3.250");
  EXPECT_FALSE(decimal::subtract("0.100", "0.200").has_value());
  EXPECT_EQ(decimal::zero(3), "0.000");
  EXPECT_TRUE(decimal::is_valid("2.30", 2));
  EXPECT_FALSE(decimal::is_valid("12.30", 2));
  EXPECT_FALSE(decimal::is_valid("1.2", 2));
  EXPECT_FALSE(decimal::is_valid(".12", 2));
  EXPECT_TRUE(decimal::is_digits("0123", 4));
}

TEST(Bits, XorAndPack) {
  EXPECT_EQ(bits::xor_strings("0110", "1100"), "1010");
  EXPECT_TRUE(bits::is_valid("0101", 4));
  EXPECT_FALSE(bits::is_valid("0121", 4));
  EXPECT_EQ(bits::pack7("1000000"), std::string(1, '\x40'));
  EXPECT_EQ(bits::pack7("11111111"), std::string("\x7f\x40", 2));
  EXPECT_EQ(bits::pack7(""), "");
  const std::string all_ones(700, '1');
  EXPECT_EQ(bits::pack7(all_ones).find('\xff'), std::string::npos);
}

TEST(CausalModel, TopologicalOrderUsesDeclarationTies) {
  const CausalModel m({
      {"C", {"A", "B"}, Deterministic{"sum", {}}},
      root_digits("B", 2),
      root_digits("A", 2),
      {"D", {"B"}, Deterministic{"copy", {}}},
  });
  EXPECT_EQ(m.order(), (std::vector<std::string>{"B", "A", "C", "D"}));
  EXPECT_EQ(topological_order(m), m.order());
  EXPECT_EQ(m.children("B"), (std::vector<std::string>{"C", "D"}));
  EXPECT_EQ(m.value_type("C"), (ValueType{ValueKind::decimal, 2}));
}

TEST(CausalModel, RejectsBadGraphs) {
  EXPECT_THROW(CausalModel({{"A", {"B"}, UniformDigits{1}}, {"B", {"A"}, UniformDigits{1}}}), ModelError);
  EXPECT_THROW(CausalModel({{"A", {"A"}, UniformDigits{1}}}), ModelError);
  EXPECT_THROW(CausalModel({{"A", {"Z"}, UniformDigits{1}}}), ModelError);
  EXPECT_THROW(CausalModel({root_digits("A", 1), root_digits("A", 1)}), ModelError);
  EXPECT_THROW(CausalModel({{"", {}, UniformDigits{1}}}), ModelError);
  try {
    CausalModel({root_digits("R", 1), {"A", {"R", "B"}, UniformDigits{1}}, {"B", {"A"}, UniformDigits{1}}});
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("cycle detected among nodes: A, B"), std::string::npos) << e.what();
  }
}

TEST(CausalModel, RejectsIllTypedMechanisms) {
  EXPECT_THROW(CausalModel({{"A", {}, LinearGaussian{{}, 0.0}}}), ModelError);
  EXPECT_THROW(CausalModel({root_digits("A", 2), {"B", {"A"}, LinearGaussian{{1.0}, 1.0}}}), ModelError);
  EXPECT_THROW(CausalModel({root_digits("A", 2), {"B", {"A"}, UniformDigits{3}}}), ModelError);
  EXPECT_THROW(CausalModel({{"X", {}, UniformBits{4}}, {"Y", {"X"}, XorConst{"101"}}}), ModelError);
  EXPECT_THROW(CausalModel({{"X", {}, UniformBits{3}}, {"Y", {"X"}, XorConst{"1a1"}}}), ModelError);
  EXPECT_THROW(CausalModel({{"X", {}, UniformBits{3}}, {"Y", {"X"}, Deterministic{"sum", {}}}}), ModelError);
  EXPECT_THROW(CausalModel({{"X", {}, Deterministic{"constant", {}}}}), ModelError);
  EXPECT_THROW(CausalModel({{"X", {}, Deterministic{"constant", NodeValue{"abc"}}}}), ModelError);
  EXPECT_THROW(CausalModel({{"X", {}, Deterministic{"square", {}}}}), ModelError);
  EXPECT_NO_THROW(CausalModel({{"X", {}, Deterministic{"constant", NodeValue{"1.50"}}}}));
}

TEST(Rng, DeterministicStreams) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    EXPECT_EQ(va, b.next());
    EXPECT_NE(va, c.next());
  }
  EXPECT_EQ(derive_seed(7, 3), splitmix64(7 ^ 3));
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(7), 7u);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(9);
  double sum = 0.0, sq = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / kN, 0.0, 0.01);
  EXPECT_NEAR(sq / kN, 1.0, 0.01);
}

TEST(Sampling, DeterministicGivenSeed) {
  const CausalModel m = models::digit_chain(4, 10);
  EXPECT_EQ(sample(m, 5, 20), sample(m, 5, 20));
  EXPECT_NE(sample(m, 5, 1)[0], sample(m, 6, 1)[0]);
  EXPECT_THROW(sample(m, 5, 0), ContractViolation);
}

TEST(Sampling, DigitChainRanges) {
  const CausalModel m = models::digit_chain(4, 10);
  for (const auto& obs : sample(m, 77, 500)) {
    validate_observation(m, obs);
    for (int j = 1; j <= 4; ++j) {
      const auto& s = std::get<std::string>(obs.at("X" + std::to_string(j)));
      const int integer = std::stoi(s.substr(0, s.find('.')));
      ASSERT_GE(integer, 0);
      ASSERT_LT(integer, j);
      ASSERT_EQ(s.size() - s.find('.') - 1, 10u);
    }
  }
}

TEST(Sampling, LinearGaussianCovarianceEmpirical) {
  const CausalModel m = models::three_node_gaussian();
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  constexpr int kN = 100000;
  for (const auto& obs : sample(m, 3, kN)) {
    Eigen::Vector3d x(std::get<double>(obs.at("X1")), std::get<double>(obs.at("X2")), std::get<double>(obs.at("X3")));
    acc += x * x.transpose();
  }
  acc /= kN;
  const Eigen::MatrixXd sigma = covariance(to_linear_scm(m));
  EXPECT_LT((acc - sigma).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Injection, OnlyDescendantsChange) {
  const CausalModel m = models::digit_chain(4, 6);
  Rng rng(12);
  const Observation base = sample_one(m, rng);
  const Observation obs = inject_anomaly(m, base, "X3", OneDigitNoise{7});
  EXPECT_EQ(obs.at("X1"), base.at("X1"));
  EXPECT_EQ(obs.at("X2"), base.at("X2"));
  EXPECT_EQ(std::get<std::string>(obs.noise.at("X3")), "700000");
  EXPECT_EQ(std::get<std::string>(obs.at("X3")), decimal::add(std::get<std::string>(obs.at("X2")), "0.700000"));
  EXPECT_EQ(obs.noise.at("X4"), base.noise.at("X4"));
  EXPECT_EQ(inject_anomaly(m, 12, "X3", OneDigitNoise{7}), obs);
}

TEST(Injection, RejectsMisfits) {
  const CausalModel m = models::digit_chain(2, 3);
  EXPECT_THROW(inject_anomaly(m, 1, "X9", OneDigitNoise{1}), ContractViolation);
  EXPECT_THROW(inject_anomaly(m, 1, "X1", OneDigitNoise{10}), ContractViolation);
  EXPECT_THROW(inject_anomaly(m, 1, "X1", SetNoise{Noise{2.0}}), ContractViolation);
  const CausalModel g = models::three_node_gaussian();
  EXPECT_THROW(inject_anomaly(g, 1, "X1", OneDigitNoise{1}), ContractViolation);
  EXPECT_THROW(inject_anomaly(g, Observation{}, "X1", SetNoise{Noise{2.0}}), ContractViolation);
}

TEST(Observation, ValidationAndParsing) {
  const CausalModel m = models::digit_chain(2, 3);
  Observation obs{{{"X1", std::string("0.123")}, {"X2", std::string("1.0")}}, {}};
  EXPECT_THROW(validate_observation(m, obs), DataError);
  obs.values.erase("X2");
  EXPECT_THROW(validate_observation(m, obs), DataError);
  EXPECT_EQ(parse_value("2.5", ValueType{ValueKind::real, 0}), NodeValue{2.5});
  EXPECT_THROW(parse_value("2.5x", ValueType{ValueKind::real, 0}), DataError);
  EXPECT_EQ(render(NodeValue{std::string("0.1")}), "0.1");
}

TEST(LinearAlgebra, ThreeNodeVariancesExact) {
  const Eigen::MatrixXd sigma = covariance(to_linear_scm(models::three_node_gaussian()));
  EXPECT_NEAR(sigma(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(sigma(1, 1), 5.0, 1e-12);
  EXPECT_NEAR(sigma(2, 2), 3.0, 1e-12);
  EXPECT_NEAR(sigma(0, 1), 2.0, 1e-12);
  EXPECT_NEAR(sigma(1, 2), -3.0, 1e-12);
}

TEST(LinearAlgebra, RejectsBadScm) {
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(2, 2);
  upper(0, 1) = 1.0;
  EXPECT_THROW(LinearSCM(upper, Eigen::Vector2d(1, 1)), ContractViolation);
  EXPECT_THROW(LinearSCM(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(1, 0)), ContractViolation);
  EXPECT_THROW(to_linear_scm(models::digit_chain(2, 2)), ModelError);
  Eigen::Matrix2d singular;
  singular << 1, 1, 1, 1;
  EXPECT_THROW(mahalanobis_sq(Eigen::Vector2d(1, 0), singular), NumericalError);
}

// Oracle: x^T Sigma^{-1} x from an explicit inverse of B D B^T.
TEST(LinearAlgebra, DecompositionMatchesDirectInverse) {
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(derive_seed(99, i));
    const auto dim = static_cast<Eigen::Index>(1 + rng.below(12));
    const LinearSCM scm = random_linear_scm(rng, dim);
    const Eigen::VectorXd x = random_normal_vector(rng, dim) * 3.0;
    const Eigen::MatrixXd sigma = covariance(scm);
    const double direct = x.dot(sigma.inverse() * x);
    const double decomposed = noise_score_decomposition(x, scm).sum();
    EXPECT_NEAR(decomposed, direct, 1e-9 * direct) << "instance " << i;
    EXPECT_NEAR(mahalanobis_sq(x, sigma), direct, 1e-9 * direct);
  }
}

// Oracle: C = Sigma^{-1} - embed(Sigma_SS^{-1}) with explicit inverses.
TEST(LinearAlgebra, CorrectionMatchesInverseDifference) {
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(derive_seed(5, i));
    const auto dim = static_cast<Eigen::Index>(2 + rng.below(5));
    const Eigen::MatrixXd sigma = random_covariance(rng, dim, 0.5);
    const auto subset = random_subset(rng, dim);
    Eigen::MatrixXd oracle = sigma.inverse();
    const Eigen::MatrixXd inner = submatrix(sigma, subset, subset).inverse();
    for (std::size_t a = 0; a < subset.size(); ++a) {
      for (std::size_t b = 0; b < subset.size(); ++b) {
        oracle(subset[a], subset[b]) -= inner(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
    const Eigen::MatrixXd c = marginalization_correction(sigma, subset);
    const double scale = sigma.inverse().cwiseAbs().maxCoeff();
    EXPECT_LT((c - oracle).cwiseAbs().maxCoeff(), 1e-9 * scale) << "instance " << i;
    const Eigen::VectorXd x = random_normal_vector(rng, dim);
    EXPECT_LE(marginal_mahalanobis_sq(x, sigma, subset), mahalanobis_sq(x, sigma) * (1 + 1e-12));
  }
}

TEST(LinearAlgebra, SubsetValidation) {
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
  const std::vector<Eigen::Index> out_of_range{0, 3}, duplicate{1, 1}, empty;
  EXPECT_THROW(marginal_mahalanobis_sq(x, sigma, out_of_range), ContractViolation);
  EXPECT_THROW(marginal_mahalanobis_sq(x, sigma, duplicate), ContractViolation);
  EXPECT_THROW(marginal_mahalanobis_sq(x, sigma, empty), ContractViolation);
  const std::vector<Eigen::Index> all{0, 1, 2};
  EXPECT_LT(marginalization_correction(sigma, all).cwiseAbs().maxCoeff(), 1e-15);
}

}  // namespace
}  // namespace ait
