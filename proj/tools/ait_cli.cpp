/*
 * Copyright 2026 The ait Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// ait: simulate causal models, score observations, attribute anomalies to
// root-cause mechanisms and run the reference experiments.
//
// Exit codes: 0 success / pass, 1 usage error, 2 input-data error,
// 3 experiment acceptance rule failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ait/ait.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitFailed = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename Write>
void write_output(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ait::DataError(path + ": cannot open for writing");
  write(out);
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const ait::CausalModel model = ait::load_model(a.model);
  const auto rows = ait::sample(model, a.seed, a.count);
  write_output(a.out, [&](std::ostream& os) { ait::write_observations_csv(model, rows, os); });
  return kExitOk;
}

// --- attribute -------------------------------------------------------------

struct AttributeArgs {
  std::string model;
  std::string data;
  std::string compressor = "lz77";
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_attribute(const AttributeArgs& a) {
  const auto compressor = ait::parse_compressor(a.compressor);
  if (!compressor) throw UsageError("--compressor must be lz77 or lz78");
  const ait::CausalModel model = ait::load_model(a.model);
  std::ifstream in(a.data);
  if (!in) throw ait::DataError(a.data + ": cannot open data file");
  const auto rows = ait::read_observations_csv(model, in);
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const ait::AttributionReport r = ait::attribute(model, rows[k], *compressor, a.seed);
    double bits = 0.0;
    for (const auto& [id, e] : r.per_node) {
      if (id == r.root_cause) bits = e.bits;
    }
    std::cout << "row " << (k + 1) << ": root_cause=" << r.root_cause << " bits=" << fixed6(bits) << '\n';
    reports.push_back(ait::to_json(r));
  }
  if (!a.out.empty()) {
    write_output(a.out, [&](std::ostream& os) { os << reports.dump(2) << '\n'; });
  }
  return kExitOk;
}

// --- experiment ------------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::string out;
  std::string csv;
  std::vector<std::string> params;
};

int cmd_experiment(const ExperimentArgs& a) {
  const auto names = ait::registered_scenarios();
  if (std::find(names.begin(), names.end(), a.name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw UsageError("unknown experiment '" + a.name + "'; registered: " + list);
  }
  ait::ExperimentConfig cfg{a.name, a.seed, a.trials, nlohmann::ordered_json::object()};
  for (const auto& kv : a.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    // JSON literals (numbers, lists) pass through; anything else is a string.
    cfg.params[key] = nlohmann::ordered_json::accept(value) ? nlohmann::ordered_json::parse(value) : nlohmann::ordered_json(value);
  }
  ait::ExperimentReport report;
  try {
    report = ait::run_experiment(cfg);
  } catch (const ait::ContractViolation& e) {
    throw UsageError(e.what());
  }
  if (!a.out.empty()) {
    write_output(a.out, [&](std::ostream& os) { os << ait::to_json(report).dump(2) << '\n'; });
  }
  if (!a.csv.empty()) {
    write_output(a.csv, [&](std::ostream& os) { ait::write_records_csv(report, os); });
  }
  std::cout << report.name << ": " << (report.pass ? "PASS" : "FAIL") << ' ' << report.summary.dump() << '\n';
  return report.pass ? kExitOk : kExitFailed;
}

// --- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string mode;
  std::optional<double> tau, z, p, neglogp;
  std::optional<std::uint64_t> m, l;
  bool uniform01 = false, gaussian = false, kl = false;
  std::optional<std::vector<double>> samples;
  std::optional<std::string> x, ctx;
  std::string compressor = "lz77";
};

double cmd_score_value(const ScoreArgs& a) {
  auto forbid = [&](bool present, const char* flag) {
    if (present) throw UsageError(std::string(flag) + " is not valid with --mode " + a.mode);
  };
  auto need = [](bool present, const char* flag) {
    if (!present) throw UsageError(std::string("missing ") + flag);
  };
  const bool it_flags = a.tau || a.uniform01 || a.gaussian || a.samples;
  const bool gauss_flags = a.z.has_value();
  const bool binary_flags = a.m || a.l || a.p || a.kl;
  const bool deficiency_flags = a.neglogp || a.x || a.ctx;
  if (a.mode == "it") {
    forbid(gauss_flags || binary_flags || deficiency_flags, "that flag");
    need(a.tau.has_value(), "--tau");
    const int refs = int{a.uniform01} + int{a.gaussian} + int{a.samples.has_value()};
    if (refs != 1) throw UsageError("--mode it needs exactly one of --uniform01, --gaussian, --samples");
    ait::Reference ref = a.uniform01   ? ait::Reference{ait::uniform_reference()}
                         : a.gaussian ? ait::Reference{ait::gaussian_reference()}
                                      : ait::Reference{ait::EmpiricalReference{*a.samples}};
    return ait::it_score(*a.tau, ref).bits;
  }
  if (a.mode == "gaussian") {
    forbid(it_flags || binary_flags || deficiency_flags, "that flag");
    need(a.z.has_value(), "--z");
    return ait::gaussian_deficiency_bound(*a.z);
  }
  if (a.mode == "binary") {
    forbid(it_flags || gauss_flags || deficiency_flags, "that flag");
    need(a.m.has_value(), "--m");
    need(a.l.has_value(), "--l");
    need(a.p.has_value(), "--p");
    return ait::binary_word_deficiency_bound(*a.m, *a.l, *a.p,
                                             a.kl ? ait::BinaryBoundMode::kl : ait::BinaryBoundMode::exact);
  }
  if (a.mode == "deficiency") {
    forbid(it_flags || gauss_flags || binary_flags, "that flag");
    need(a.neglogp.has_value(), "--neglogp");
    need(a.x.has_value(), "--x");
    const auto c = ait::parse_compressor(a.compressor);
    if (!c) throw UsageError("--compressor must be lz77 or lz78");
    return ait::deficiency_estimate(*a.neglogp, *a.x, a.ctx.value_or(""), *c).bits;
  }
  throw UsageError("--mode must be one of it, gaussian, binary, deficiency");
}

int cmd_score(const ScoreArgs& a) {
  try {
    std::cout << fixed6(cmd_score_value(a)) << '\n';
  } catch (const ait::ContractViolation& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

// --- calibrate -------------------------------------------------------------

struct CalibrateArgs {
  double value = 1.0;
  std::string form = "probability";
};

int cmd_calibrate(const CalibrateArgs& a) {
  ait::TestForm form;
  if (a.form == "ratio") {
    form = ait::TestForm::ratio;
  } else if (a.form == "probability") {
    form = ait::TestForm::probability;
  } else if (a.form == "log") {
    form = ait::TestForm::log;
  } else {
    throw UsageError("--form must be ratio, probability or log");
  }
  try {
    const auto p = ait::TestScore::make(a.value, ait::TestKind::p_test, form);
    std::cout << fixed6(ait::ramdas_calibrate(p).value) << '\n';
  } catch (const ait::ContractViolation& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomness-deficiency outlier scores and root-cause attribution", "ait"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample observations from a model file as CSV");
  simulate->add_option("--model", sim.model, "Model JSON file")->required();
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--count", sim.count, "Number of observations")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output CSV path (default: standard output)");

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Compute a single score in bits");
  score->add_option("--mode", sc.mode, "it | gaussian | binary | deficiency")->required();
  score->add_option("--tau", sc.tau, "Feature statistic value (it)");
  score->add_flag("--uniform01", sc.uniform01, "Uniform [0,1] reference (it)");
  score->add_flag("--gaussian", sc.gaussian, "Standard Gaussian reference (it)");
  score->add_option("--samples", sc.samples, "Empirical reference samples (it)")->delimiter(',');
  score->add_option("--z", sc.z, "Offset in sigma units (gaussian)");
  score->add_option("--m", sc.m, "Word length (binary)");
  score->add_option("--l", sc.l, "Hamming weight (binary)");
  score->add_option("--p", sc.p, "Bit probability (binary)");
  score->add_flag("--kl", sc.kl, "KL form instead of the exact count (binary)");
  score->add_option("--neglogp", sc.neglogp, "-log2 P(x) in bits (deficiency)");
  score->add_option("--x", sc.x, "Observed string (deficiency)");
  score->add_option("--ctx", sc.ctx, "Context string (deficiency)");
  score->add_option("--compressor", sc.compressor, "lz77 | lz78 (deficiency)");

  AttributeArgs at;
  auto* attribute = app.add_subcommand("attribute", "Attribute each observation row to a root-cause mechanism");
  attribute->add_option("--model", at.model, "Model JSON file")->required();
  attribute->add_option("--data", at.data, "Observation CSV file")->required();
  attribute->add_option("--compressor", at.compressor, "lz77 | lz78");
  attribute->add_option("--out", at.out, "Report JSON path");
  attribute->add_option("--seed", at.seed, "Seed recorded in the reports");

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run a registered experiment scenario");
  experiment->add_option("--name", ex.name, "Scenario name")->required();
  experiment->add_option("--seed", ex.seed, "Random seed");
  experiment->add_option("--trials", ex.trials, "Number of trials")->check(CLI::PositiveNumber);
  experiment->add_option("--out", ex.out, "Report JSON path");
  experiment->add_option("--csv", ex.csv, "Per-trial CSV path");
  experiment->add_option("--param", ex.params, "Scenario parameter key=value (repeatable)");

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Ramdas-calibrate a p-value into an e-value (ratio form)");
  calibrate->add_option("--value", cal.value, "p-test value")->required();
  calibrate->add_option("--form", cal.form, "ratio | probability | log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*score) return cmd_score(sc);
    if (*attribute) return cmd_attribute(at);
    if (*experiment) return cmd_experiment(ex);
    if (*calibrate) return cmd_calibrate(cal);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ait::ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitData;
  } catch (const ait::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ait::ContractViolation& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitData;
  } catch (const ait::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
