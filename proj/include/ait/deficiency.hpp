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

// Computable lower bounds on (conditional) randomness deficiency
//   delta(x | ctx) = -log2 P(x | ctx) - K(x | ctx),
// with K replaced by an upper bound: a compressed length, or a counting
// argument for the closed-form bounds below. All reported bounds are clamped
// at zero.

#ifndef AIT_DEFICIENCY_HPP_
#define AIT_DEFICIENCY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "ait/error.hpp"
#include "ait/lzc.hpp"

namespace ait {

struct DeficiencyEstimate {
  double bits = 0.0;
  double neg_log_prob_bits = 0.0;
  double complexity_bits = 0.0;
  bool clamped = false;

  // Unclamped neg_log_prob_bits - complexity_bits.
  double margin() const { return neg_log_prob_bits - complexity_bits; }

  static DeficiencyEstimate from_terms(double neg_log_prob_bits, double complexity_bits) {
    const double raw = neg_log_prob_bits - complexity_bits;
    return DeficiencyEstimate{std::max(0.0, raw), neg_log_prob_bits, complexity_bits, raw < 0.0};
  }

  friend bool operator==(const DeficiencyEstimate&, const DeficiencyEstimate&) = default;
};

inline DeficiencyEstimate deficiency_estimate(double neg_log_prob_bits, std::string_view x,
                                              std::string_view ctx, CompressorId c) {
  detail::require(std::isfinite(neg_log_prob_bits), "neg_log_prob_bits must be finite");
  const auto complexity = static_cast<double>(cond_complexity_estimate(x, ctx, c));
  return DeficiencyEstimate::from_terms(neg_log_prob_bits, complexity);
}

// Gaussian offset z = (x - mu) / sigma in sigma units: (log2 e / 2) z^2 minus
// 2 log2 max(|z|, 2) bits to describe the offset.
inline double gaussian_deficiency_bound(double z) {
  detail::require(std::isfinite(z), "z-score must be finite");
  detail::require(z != 0.0,
                  "z = 0 is an exact-mode coincidence; use deficiency_estimate on the "
                  "discretized value instead");
  const double a = std::abs(z);
  return std::max(0.0, 0.5 * std::numbers::log2e * z * z - 2.0 * std::log2(std::max(a, 2.0)));
}

// log2 C(m, l) from the exact binomial coefficient.
inline double log2_binomial(std::uint64_t m, std::uint64_t l) {
  detail::require(l <= m, "binomial needs l <= m");
  using boost::multiprecision::cpp_int;
  const std::uint64_t k = std::min(l, m - l);
  cpp_int c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    c *= m - i;
    c /= i + 1;
  }
  const auto top = boost::multiprecision::msb(c);
  if (top < 53) return std::log2(c.convert_to<double>());
  const auto shift = top - 52;
  const cpp_int head = c >> shift;
  return std::log2(head.convert_to<double>()) + static_cast<double>(shift);
}

// Unclamped statistic of the exact binary-word bound:
//   -l log2 p - (m - l) log2(1 - p) - log2 C(m, l) - log2(m + 1).
// 2^value is an e-test under i.i.d. Bernoulli(p) bits.
inline double binary_word_log_ratio(std::uint64_t m, std::uint64_t l, double p) {
  detail::require(m >= 1, "word length must be positive");
  detail::require(l <= m, "Hamming weight must lie in [0, m]");
  detail::require(p > 0.0 && p < 1.0, "bit probability must lie in (0, 1)");
  const double ones = static_cast<double>(l);
  const double zeros = static_cast<double>(m - l);
  return -ones * std::log2(p) - zeros * std::log2(1.0 - p) - log2_binomial(m, l) -
         std::log2(static_cast<double>(m) + 1.0);
}

// Binary KL divergence D(q || p) in bits, with 0 log 0 = 0.
inline double binary_kl_bits(double q, double p) {
  double d = 0.0;
  if (q > 0.0) d += q * std::log2(q / p);
  if (q < 1.0) d += (1.0 - q) * std::log2((1.0 - q) / (1.0 - p));
  return d;
}

enum class BinaryBoundMode { exact, kl };

inline double binary_word_deficiency_bound(std::uint64_t m, std::uint64_t l, double p,
                                           BinaryBoundMode mode) {
  if (mode == BinaryBoundMode::exact) return std::max(0.0, binary_word_log_ratio(m, l, p));
  detail::require(m >= 1, "word length must be positive");
  detail::require(l <= m, "Hamming weight must lie in [0, m]");
  detail::require(p > 0.0 && p < 1.0, "bit probability must lie in (0, 1)");
  const double q = static_cast<double>(l) / static_cast<double>(m);
  return std::max(0.0, static_cast<double>(m) * binary_kl_bits(q, p));
}

// Evidence for an alternative model that costs desc_cost_bits to describe.
inline double model_switch_bound(double log_p_bits, double log_alt_bits, double desc_cost_bits) {
  detail::require(std::isfinite(log_p_bits), "log P(x) must be finite");
  detail::require(!std::isnan(log_alt_bits) && log_alt_bits < std::numeric_limits<double>::infinity(),
                  "log P_alt(x) must be a log-probability");
  detail::require(desc_cost_bits >= 0.0, "description cost must be nonnegative");
  if (log_alt_bits == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::max(0.0, (log_alt_bits - log_p_bits) - desc_cost_bits);
}

}  // namespace ait

#endif  // AIT_DEFICIENCY_HPP_
