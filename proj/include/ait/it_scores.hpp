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

// Information-theoretic outlier scores: -log2 of a tail probability of a
// feature statistic, its conditional variant for a causal mechanism, and the
// calibrated joint score over several mechanisms.

#ifndef AIT_IT_SCORES_HPP_
#define AIT_IT_SCORES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ait/error.hpp"
#include "ait/stat_tests.hpp"

namespace ait {

// A p-test in log form, in bits. A non-empty parent_context marks a
// conditional score lambda(x_j | pa_j).
struct ITScore {
  double bits = 0.0;
  std::string feature_id;
  std::vector<double> parent_context;

  bool conditional() const { return !parent_context.empty(); }
};

inline ITScore it_score(double tau_x, const Reference& reference, std::string feature_id = "tau") {
  const double p = upper_tail(tau_x, reference);
  // -log2(1) is -0.0; keep the sign clean.
  return ITScore{p >= 1.0 ? 0.0 : -std::log2(p), std::move(feature_id), {}};
}

// Maps parent values to the null distribution of tau(X_j) given those
// parents; returns nullopt when no reference exists for them.
using ConditionalReference =
    std::function<std::optional<Reference>(std::span<const double> parent_values)>;

inline ITScore conditional_it_score(double tau_xj, std::span<const double> parent_values,
                                    const ConditionalReference& conditional_reference,
                                    std::string feature_id = "tau") {
  detail::require(static_cast<bool>(conditional_reference), "conditional reference is empty");
  const std::optional<Reference> reference = conditional_reference(parent_values);
  detail::require(reference.has_value(), "no conditional reference for the supplied parents");
  ITScore score = it_score(tau_xj, *reference, std::move(feature_id));
  score.parent_context.assign(parent_values.begin(), parent_values.end());
  return score;
}

namespace detail {

// -ln Q(n, s) for the regularized upper incomplete gamma function with
// integer shape n, i.e. the Erlang(n, 1) survival function at s.
inline double neg_log_erlang_survival(std::size_t n, double s) {
  if (s == 0.0) return 0.0;
  const double ns = static_cast<double>(n);
  if (s < ns) {
    // Lower tail P(n, s) = e^{-s} sum_{i >= n} s^i / i! converges quickly
    // here and keeps precision when Q is close to 1.
    double term = std::exp(ns * std::log(s) - s - std::lgamma(ns + 1.0));
    double lower = 0.0;
    for (std::size_t i = n; term > 1e-300; ++i) {
      lower += term;
      if (term < 1e-17 * lower) break;
      term *= s / static_cast<double>(i + 1);
    }
    return -std::log1p(-std::min(lower, 1.0));
  }
  // Upper tail in the log domain: s - log(sum_{i < n} s^i / i!).
  const double log_s = std::log(s);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    terms[i] = static_cast<double>(i) * log_s - std::lgamma(static_cast<double>(i) + 1.0);
    max_term = std::max(max_term, terms[i]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return s - (max_term + std::log(acc));
}

}  // namespace detail

// Joint score over n conditional scores: with S = ln 2 * sum(bits) in nats,
// returns -log2 of the Erlang(n) survival e^{-S} sum_{i<n} S^i / i!. If each
// conditional p-value is uniform the result is again an exact IT score.
inline ITScore joint_convolution_score(std::span<const double> conditional_bits) {
  detail::require(!conditional_bits.empty(), "joint score needs at least one conditional score");
  double total = 0.0;
  for (double b : conditional_bits) {
    detail::require(!std::isnan(b) && b >= 0.0, "conditional scores must be >= 0");
    detail::require(std::isfinite(b), "conditional scores must be finite");
    total += b;
  }
  if (conditional_bits.size() == 1) return ITScore{conditional_bits[0], "joint", {}};
  const double nats = std::numbers::ln2 * total;
  const double bits = detail::neg_log_erlang_survival(conditional_bits.size(), nats) / std::numbers::ln2;
  return ITScore{std::clamp(bits, 0.0, total), "joint", {}};
}

}  // namespace ait

#endif  // AIT_IT_SCORES_HPP_
