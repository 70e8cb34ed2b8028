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

// Root-cause attribution: per-mechanism conditional deficiency estimates,
// the argmax root cause, and the gap between the joint estimate and the sum
// of mechanism estimates (zero up to constants when the mechanisms are
// algorithmically independent).

#ifndef AIT_ATTRIBUTION_HPP_
#define AIT_ATTRIBUTION_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ait/causal.hpp"
#include "ait/deficiency.hpp"
#include "ait/error.hpp"
#include "ait/lzc.hpp"

namespace ait {

// Per-node estimates in topological order.
using MechanismScores = std::vector<std::pair<std::string, DeficiencyEstimate>>;

struct AttributionReport {
  MechanismScores per_node;
  std::string root_cause;
  double joint_estimate_bits = 0.0;
  double decomposition_gap_bits = 0.0;
  CompressorId compressor = CompressorId::lz77;
  std::uint64_t seed = 0;
};

// Byte string handed to the compressor: decimals verbatim, bit strings
// packed seven bits per byte.
inline std::string compressor_input(std::string_view value, const ValueType& type) {
  return type.kind == ValueKind::bitstring ? bits::pack7(value) : std::string(value);
}

// String parameters of a mechanism (the part of P* a compressor can exploit).
inline std::string mechanism_description(const NodeSpec& n) {
  if (const auto* x = std::get_if<XorConst>(&n.mechanism)) return bits::pack7(x->constant);
  if (const auto* d = std::get_if<Deterministic>(&n.mechanism)) {
    if (d->value) {
      if (const auto* s = std::get_if<std::string>(&*d->value)) {
        return bits::is_valid(*s, static_cast<int>(s->size())) ? bits::pack7(*s) : *s;
      }
    }
  }
  return {};
}

inline std::string model_description(const CausalModel& model) {
  std::string out;
  for (std::size_t i : model.order_indices()) out += mechanism_description(model.nodes()[i]);
  return out;
}

namespace detail {

inline double log2_decimal_outcomes(int digits) { return digits * std::log2(10.0); }

inline DeficiencyEstimate zero_estimate() { return DeficiencyEstimate{}; }

inline DeficiencyEstimate score_node(const NodeSpec& n, const Observation& obs,
                                     CompressorId c) {
  std::vector<const NodeValue*> parents;
  for (const auto& p : n.parents) parents.push_back(&obs.at(p));
  const NodeValue& value = obs.at(n.id);
  auto unsupported = [&]() {
    return DataError("node '" + n.id + "': value '" + render(value) + "' has zero probability under its mechanism");
  };
  return std::visit(
      [&](const auto& m) -> DeficiencyEstimate {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearGaussian>) {
          double mean = 0.0;
          for (std::size_t k = 0; k < parents.size(); ++k) mean += m.coefficients[k] * std::get<double>(*parents[k]);
          const double z = (std::get<double>(value) - mean) / m.noise_sd;
          // Same terms as gaussian_deficiency_bound, which rejects z == 0.
          return DeficiencyEstimate::from_terms(0.5 * std::numbers::log2e * z * z,
                                                2.0 * std::log2(std::max(std::abs(z), 2.0)));
        } else if constexpr (std::is_same_v<M, UniformDigits>) {
          std::string base = decimal::zero(m.digits);
          std::string ctx = mechanism_description(n);
          for (const NodeValue* p : parents) {
            base = decimal::add(base, std::get<std::string>(*p));
            ctx += std::get<std::string>(*p);
          }
          const auto noise = decimal::subtract(std::get<std::string>(value), base);
          if (!noise || (*noise)[0] != '0') throw unsupported();
          return deficiency_estimate(log2_decimal_outcomes(m.digits), std::get<std::string>(value), ctx, c);
        } else if constexpr (std::is_same_v<M, UniformBits>) {
          return deficiency_estimate(static_cast<double>(m.bits), bits::pack7(std::get<std::string>(value)),
                                     mechanism_description(n), c);
        } else {
          // Deterministic mechanisms: probability one on the mapped value.
          if (evaluate_node(n, parents, Noise{}) != value) throw unsupported();
          return zero_estimate();
        }
      },
      n.mechanism);
}

}  // namespace detail

// Conditional deficiency estimate of every mechanism given its parents.
// Strings (digit and bit nodes) are scored against the concatenation of
// their parents' strings; roots use an empty context. Gaussian nodes use the
// analytic z-score bound on their conditional residual.
inline MechanismScores mechanism_deficiencies(const CausalModel& model, const Observation& obs, CompressorId c) {
  validate_observation(model, obs);
  MechanismScores out;
  for (std::size_t i : model.order_indices()) {
    const NodeSpec& n = model.nodes()[i];
    out.emplace_back(n.id, detail::score_node(n, obs, c));
  }
  return out;
}

// Argmax of bits. Ties go to the larger unclamped margin, then to the earliest
// node, so clamped-to-zero estimates still rank by compressed length when
// their probability terms agree.
inline std::string root_cause(const MechanismScores& scores) {
  detail::require(!scores.empty(), "root_cause needs at least one score");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& a = scores[i].second;
    const auto& b = scores[best].second;
    if (a.bits > b.bits || (a.bits == b.bits && a.margin() > b.margin())) best = i;
  }
  return scores[best].first;
}

// All node strings in topological order, separated by 0xFF.
inline std::string joint_string(const CausalModel& model, const Observation& obs) {
  std::string out;
  bool first = true;
  for (std::size_t i : model.order_indices()) {
    const NodeSpec& n = model.nodes()[i];
    const auto* s = std::get_if<std::string>(&obs.at(n.id));
    detail::require(s != nullptr, "node '" + n.id + "' is not string-valued");
    const std::string rendered = compressor_input(*s, model.value_type(n.id));
    detail::require_payload(rendered, "node value");
    if (!first) out.push_back(kSeparator);
    out += rendered;
    first = false;
  }
  return out;
}

// Joint estimate: neg_log_prob_joint_bits minus the compressed length of the
// joint string given the model's own string parameters.
inline DeficiencyEstimate joint_deficiency_estimate(const CausalModel& model, double neg_log_prob_joint_bits,
                                                    const Observation& obs, CompressorId c) {
  detail::require(std::isfinite(neg_log_prob_joint_bits), "neg_log_prob_joint_bits must be finite");
  const std::string ctx = model_description(model);
  detail::require_payload(ctx, "model description");
  const auto complexity = static_cast<double>(detail::conditional_bits(joint_string(model, obs), ctx, c));
  return DeficiencyEstimate::from_terms(neg_log_prob_joint_bits, complexity);
}

inline double decomposition_gap(const DeficiencyEstimate& joint, const MechanismScores& per_node) {
  double total = 0.0;
  for (const auto& [id, e] : per_node) total += e.bits;
  return joint.bits - total;
}

namespace detail {

inline bool all_string_valued(const CausalModel& model) {
  for (const auto& n : model.nodes()) {
    if (model.value_type(n.id).kind == ValueKind::real) return false;
  }
  return true;
}

inline bool all_linear_gaussian(const CausalModel& model) {
  for (const auto& n : model.nodes()) {
    if (!std::holds_alternative<LinearGaussian>(n.mechanism)) return false;
  }
  return true;
}

// Gaussian joint: (log2 e / 2) x^T Sigma^{-1} x against the summed offset costs.
inline DeficiencyEstimate gaussian_joint_estimate(const CausalModel& model, const Observation& obs) {
  const LinearSCM scm = to_linear_scm(model);
  const auto& order = model.order_indices();
  Eigen::VectorXd x(static_cast<Eigen::Index>(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    x(static_cast<Eigen::Index>(k)) = std::get<double>(obs.at(model.nodes()[order[k]].id));
  }
  const double m2 = mahalanobis_sq(x, covariance(scm));
  const Eigen::VectorXd z = scm.residuals(x).array() / scm.noise_variances().array().sqrt();
  double cost = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) cost += 2.0 * std::log2(std::max(std::abs(z(i)), 2.0));
  return DeficiencyEstimate::from_terms(0.5 * std::numbers::log2e * m2, cost);
}

}  // namespace detail

// Full report. String-valued models use the compressor joint estimate with
// the summed mechanism probability terms; all-linear-Gaussian models use the
// Mahalanobis form. Mixed models are rejected.
inline AttributionReport attribute(const CausalModel& model, const Observation& obs, CompressorId c,
                                   std::uint64_t seed = 0) {
  AttributionReport report;
  report.per_node = mechanism_deficiencies(model, obs, c);
  report.root_cause = root_cause(report.per_node);
  report.compressor = c;
  report.seed = seed;
  DeficiencyEstimate joint;
  if (detail::all_string_valued(model)) {
    double neg = 0.0;
    for (const auto& [id, e] : report.per_node) neg += e.neg_log_prob_bits;
    joint = joint_deficiency_estimate(model, neg, obs, c);
  } else if (detail::all_linear_gaussian(model)) {
    joint = detail::gaussian_joint_estimate(model, obs);
  } else {
    throw ModelError("joint estimates need an all-string or an all-linear-Gaussian model");
  }
  report.joint_estimate_bits = joint.bits;
  report.decomposition_gap_bits = decomposition_gap(joint, report.per_node);
  return report;
}

inline nlohmann::ordered_json to_json(const DeficiencyEstimate& e) {
  return nlohmann::ordered_json{{"bits", e.bits},
                                {"neg_log_prob_bits", e.neg_log_prob_bits},
                                {"complexity_bits", e.complexity_bits},
                                {"clamped", e.clamped}};
}

inline nlohmann::ordered_json to_json(const AttributionReport& r) {
  nlohmann::ordered_json per_node = nlohmann::ordered_json::object();
  for (const auto& [id, e] : r.per_node) per_node[id] = to_json(e);
  return nlohmann::ordered_json{{"per_node", per_node},
                                {"root_cause", r.root_cause},
                                {"joint_estimate_bits", r.joint_estimate_bits},
                                {"decomposition_gap_bits", r.decomposition_gap_bits},
                                {"compressor", std::string(to_string(r.compressor))},
                                {"seed", r.seed}};
}

}  // namespace ait

#endif  // AIT_ATTRIBUTION_HPP_
