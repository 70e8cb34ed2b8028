// Copyright 2026 The ait Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "ait/experiments.hpp"

namespace ait {
namespace {

ExperimentReport run(const std::string& name, std::uint64_t seed, std::size_t trials,
                     nlohmann::ordered_json params = nlohmann::ordered_json::object()) {
  return run_experiment(ExperimentConfig{name, seed, trials, std::move(params)});
}

TEST(Experiments, Registry) {
  const auto names = registered_scenarios();
  for (const char* n : {"chain", "three_node", "xor", "lemma1", "maha_monotonicity", "maha_decomposition"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
  EXPECT_THROW(run("nosuch", 1, 1), ContractViolation);
  EXPECT_THROW(run("chain", 1, 0), ContractViolation);
}

TEST(Experiments, FittedSlope) {
  EXPECT_NEAR(fitted_slope({1, 2, 3, 4}, {3, 5, 7, 9}), 2.0, 1e-12);
  EXPECT_THROW(fitted_slope({1, 1}, {2, 3}), ContractViolation);
}

TEST(Experiments, ChainIsReproducible) {
  const auto a = run("chain", 3, 20);
  const auto b = run("chain", 3, 20);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(a.records.size(), 20u);
  EXPECT_TRUE(a.pass);
  EXPECT_GE(a.summary.at("correct").get<int>(), 19);
}

TEST(Experiments, ChainParamsAndTypes) {
  const auto r = run("chain", 3, 10, {{"n", 3}, {"d", 4}, {"compressor", "lz78"}});
  EXPECT_EQ(r.records.size(), 10u);
  EXPECT_TRUE(r.pass);
  EXPECT_THROW(run("chain", 3, 2, {{"n", "four"}}), ContractViolation);
  EXPECT_THROW(run("chain", 3, 2, {{"compressor", "gzip"}}), ContractViolation);
}

TEST(Experiments, ThreeNode) {
  const auto r = run("three_node", 1, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.summary.at("var_x2").get<double>(), 5.0, 1e-12);
  EXPECT_NEAR(r.records[0].at("z2_x3").get<double>(), 25.0 / 3.0, 1e-9);
}

TEST(Experiments, XorSmallGrid) {
  const auto r = run("xor", 2, 1, {{"d", {64, 128, 256}}});
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.summary.at("gap_slope_bits_per_bit").get<double>(), 0.0);
}

TEST(Experiments, Lemma1Small) {
  const auto r = run("lemma1", 4, 1, {{"N", 100000}});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.records.size(), 2u);
}

TEST(Experiments, MahaScenariosSmall) {
  EXPECT_TRUE(run("maha_monotonicity", 5, 1, {{"instances", 500}}).pass);
  EXPECT_TRUE(run("maha_decomposition", 5, 1, {{"instances", 500}}).pass);
}

TEST(Experiments, CsvOutput) {
  const auto r = run("three_node", 1, 1, {{"n2", {5.0}}});
  std::ostringstream out;
  write_records_csv(r, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "n2,z2_x2,z2_x3,conditional_x2,pair_x1_x2,exact,ordered,x3_within_pair");
  EXPECT_NE(text.find("\n5,"), std::string::npos) << text;
  EXPECT_NE(text.find(",25,25,true,true,true\n"), std::string::npos) << text;
}

}  // namespace
}  // namespace ait
