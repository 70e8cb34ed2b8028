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

// Causal Bayesian networks over scalar and string-valued nodes: validation,
// topological ordering, seeded ancestral sampling, noise overrides, and the
// linear-Gaussian algebra (covariance, Mahalanobis distance and its
// per-mechanism decomposition).

#ifndef AIT_CAUSAL_HPP_
#define AIT_CAUSAL_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ait/error.hpp"

namespace ait {

// ---------------------------------------------------------------------------
// Values

// Real scalar, or a string: fixed-point decimal "I.FFF...F" or a bit string.
using NodeValue = std::variant<double, std::string>;
// Per-node exogenous noise; monostate for deterministic mechanisms. Digit
// noise is stored as its d fractional digits, e.g. "4000000000".
using Noise = std::variant<std::monostate, double, std::string>;

namespace decimal {

inline bool is_valid(std::string_view s, int digits) {
  if (s.size() != static_cast<std::size_t>(digits) + 2 || s[1] != '.') return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != 1 && (s[i] < '0' || s[i] > '9')) return false;
  }
  return true;
}

inline bool is_digits(std::string_view s, int digits) {
  return s.size() == static_cast<std::size_t>(digits) &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline std::string zero(int digits) { return "0." + std::string(static_cast<std::size_t>(digits), '0'); }

// "0." + fractional digits.
inline std::string from_fraction(std::string_view fraction) { return "0." + std::string(fraction); }

// Exact sum of two fixed-point values with the same number of digits. The
// integer digit must stay in 0..9.
inline std::string add(std::string_view a, std::string_view b) {
  detail::require(a.size() == b.size() && a.size() >= 3, "decimal operands differ in precision");
  std::string out(a.size(), '0');
  out[1] = '.';
  int carry = 0;
  for (std::size_t k = a.size(); k-- > 0;) {
    if (k == 1) continue;
    const int sum = (a[k] - '0') + (b[k] - '0') + carry;
    out[k] = static_cast<char>('0' + sum % 10);
    carry = sum / 10;
  }
  if (carry != 0) throw DataError("decimal sum overflows one integer digit");
  return out;
}

// a - b for a >= b; nullopt when the difference would be negative.
inline std::optional<std::string> subtract(std::string_view a, std::string_view b) {
  detail::require(a.size() == b.size() && a.size() >= 3, "decimal operands differ in precision");
  std::string out(a.size(), '0');
  out[1] = '.';
  int borrow = 0;
  for (std::size_t k = a.size(); k-- > 0;) {
    if (k == 1) continue;
    int diff = (a[k] - '0') - (b[k] - '0') - borrow;
    borrow = diff < 0 ? 1 : 0;
    out[k] = static_cast<char>('0' + diff + 10 * borrow);
  }
  if (borrow != 0) return std::nullopt;
  return out;
}

}  // namespace decimal

namespace bits {

inline bool is_valid(std::string_view s, int width) {
  return s.size() == static_cast<std::size_t>(width) &&
         std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

// Packs a 0/1 string seven bits per byte, MSB first, zero-padding the last
// byte. Bytes stay below 0x80, so the result never contains the 0xFF
// separator; the width is known from the value type, so packing is injective.
inline std::string pack7(std::string_view s) {
  std::string out;
  out.reserve((s.size() + 6) / 7);
  for (std::size_t i = 0; i < s.size(); i += 7) {
    unsigned byte = 0;
    for (std::size_t k = 0; k < 7; ++k) {
      byte <<= 1;
      if (i + k < s.size() && s[i + k] == '1') byte |= 1u;
    }
    out.push_back(static_cast<char>(byte));
  }
  return out;
}

inline std::string xor_strings(std::string_view a, std::string_view b) {
  detail::require(a.size() == b.size(), "xor operands differ in width");
  std::string out(a.size(), '0');
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] == b[i]) ? '0' : '1';
  return out;
}

}  // namespace bits

// Shortest round-trip text for a double; strings are returned unchanged.
inline std::string render(const NodeValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Mechanisms

struct LinearGaussian {
  std::vector<double> coefficients;  // aligned with the node's parent list
  double noise_sd = 1.0;
};

// Parent sum plus noise uniform on {0, 10^-d, ..., 1 - 10^-d}.
struct UniformDigits {
  int digits = 1;
};

// Uniform over {0,1}^bits; roots only.
struct UniformBits {
  int bits = 1;
};

// y = x XOR constant for a single bit-string parent.
struct XorConst {
  std::string constant;
};

// Named noiseless maps: "copy" (one parent), "sum" (real or decimal parents),
// "negate" (one real parent), "constant" (no parents, value given).
struct Deterministic {
  std::string map;
  std::optional<NodeValue> value;
};

using MechanismSpec = std::variant<LinearGaussian, UniformDigits, UniformBits, XorConst, Deterministic>;

inline std::string_view mechanism_kind(const MechanismSpec& m) {
  static constexpr std::string_view kNames[] = {"linear_gaussian", "uniform_digits", "uniform_bits",
                                                "xor_const", "deterministic"};
  return kNames[m.index()];
}

struct NodeSpec {
  std::string id;
  std::vector<std::string> parents;
  MechanismSpec mechanism;
};

enum class ValueKind { real, decimal, bitstring };

struct ValueType {
  ValueKind kind = ValueKind::real;
  int width = 0;  // fractional digits for decimal, bit count for bitstring

  friend bool operator==(const ValueType&, const ValueType&) = default;
};

// ---------------------------------------------------------------------------
// Model

// Immutable validated DAG. Construction throws ModelError on cycles, unknown
// parents, duplicate ids and ill-typed mechanisms.
class CausalModel {
 public:
  CausalModel() = default;

  explicit CausalModel(std::vector<NodeSpec> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id.empty()) throw ModelError("node " + std::to_string(i) + ": empty id");
      if (!index_.emplace(nodes_[i].id, i).second) throw ModelError("duplicate node id '" + nodes_[i].id + "'");
    }
    for (const auto& n : nodes_) {
      std::set<std::string> seen;
      for (const auto& p : n.parents) {
        if (!index_.count(p)) throw ModelError("node '" + n.id + "': unknown parent '" + p + "'");
        if (p == n.id) throw ModelError("cycle detected: node '" + n.id + "' is its own parent");
        if (!seen.insert(p).second) throw ModelError("node '" + n.id + "': duplicate parent '" + p + "'");
      }
    }
    order_ = sort_topologically();
    types_.resize(nodes_.size());
    for (std::size_t i : order_) types_[i] = check_mechanism(nodes_[i]);
  }

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

  std::size_t index_of(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    detail::require(it != index_.end(), "unknown node '" + std::string(id) + "'");
    return it->second;
  }

  const NodeSpec& node(std::string_view id) const { return nodes_[index_of(id)]; }
  const ValueType& value_type(std::string_view id) const { return types_[index_of(id)]; }

  // Declaration indices, parents first, ties by declaration order.
  const std::vector<std::size_t>& order_indices() const { return order_; }

  std::vector<std::string> order() const {
    std::vector<std::string> ids;
    ids.reserve(order_.size());
    for (std::size_t i : order_) ids.push_back(nodes_[i].id);
    return ids;
  }

  std::vector<std::string> children(std::string_view id) const {
    std::vector<std::string> out;
    for (std::size_t i : order_) {
      const auto& ps = nodes_[i].parents;
      if (std::find(ps.begin(), ps.end(), id) != ps.end()) out.push_back(nodes_[i].id);
    }
    return out;
  }

 private:
  std::vector<std::size_t> sort_topologically() const {
    std::vector<std::size_t> order;
    std::vector<bool> placed(nodes_.size(), false);
    while (order.size() < nodes_.size()) {
      bool progressed = false;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (placed[i]) continue;
        const bool ready = std::all_of(nodes_[i].parents.begin(), nodes_[i].parents.end(),
                                       [&](const std::string& p) { return placed[index_.at(p)]; });
        if (ready) {
          placed[i] = true;
          order.push_back(i);
          progressed = true;
          break;  // restart so the earliest declared ready node always goes next
        }
      }
      if (!progressed) {
        std::string cyc;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
          if (!placed[i]) cyc += (cyc.empty() ? "" : ", ") + nodes_[i].id;
        }
        throw ModelError("cycle detected among nodes: " + cyc);
      }
    }
    return order;
  }

  ValueType parent_type(const NodeSpec& n, std::size_t k) const { return types_[index_.at(n.parents[k])]; }

  ValueType check_mechanism(const NodeSpec& n) const {
    const std::string where = "node '" + n.id + "' (" + std::string(mechanism_kind(n.mechanism)) + "): ";
    auto fail = [&](const std::string& what) -> ValueType { throw ModelError(where + what); };
    return std::visit(
        [&](const auto& m) -> ValueType {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, LinearGaussian>) {
            if (!(m.noise_sd > 0.0) || !std::isfinite(m.noise_sd)) return fail("noise_sd must be > 0");
            if (m.coefficients.size() != n.parents.size()) return fail("one coefficient per parent required");
            for (std::size_t k = 0; k < n.parents.size(); ++k) {
              if (!std::isfinite(m.coefficients[k])) return fail("coefficients must be finite");
              if (parent_type(n, k).kind != ValueKind::real) return fail("parents must be real-valued");
            }
            return ValueType{ValueKind::real, 0};
          } else if constexpr (std::is_same_v<M, UniformDigits>) {
            if (m.digits < 1) return fail("digits must be >= 1");
            for (std::size_t k = 0; k < n.parents.size(); ++k) {
              if (parent_type(n, k) != ValueType{ValueKind::decimal, m.digits}) {
                return fail("parents must be decimal values with the same digit count");
              }
            }
            return ValueType{ValueKind::decimal, m.digits};
          } else if constexpr (std::is_same_v<M, UniformBits>) {
            if (m.bits < 1) return fail("bits must be >= 1");
            if (!n.parents.empty()) return fail("uniform_bits takes no parents");
            return ValueType{ValueKind::bitstring, m.bits};
          } else if constexpr (std::is_same_v<M, XorConst>) {
            const int w = static_cast<int>(m.constant.size());
            if (w < 1 || !bits::is_valid(m.constant, w)) return fail("constant must be a nonempty 0/1 string");
            if (n.parents.size() != 1) return fail("xor_const takes exactly one parent");
            if (parent_type(n, 0) != ValueType{ValueKind::bitstring, w}) {
              return fail("constant length must match the parent's bit width");
            }
            return ValueType{ValueKind::bitstring, w};
          } else {
            if (m.map == "copy") {
              if (n.parents.size() != 1) return fail("copy takes exactly one parent");
              return parent_type(n, 0);
            }
            if (m.map == "negate") {
              if (n.parents.size() != 1 || parent_type(n, 0).kind != ValueKind::real) {
                return fail("negate takes exactly one real parent");
              }
              return ValueType{ValueKind::real, 0};
            }
            if (m.map == "sum") {
              if (n.parents.empty()) return fail("sum needs at least one parent");
              const ValueType t = parent_type(n, 0);
              if (t.kind == ValueKind::bitstring) return fail("sum is undefined for bit strings");
              for (std::size_t k = 1; k < n.parents.size(); ++k) {
                if (parent_type(n, k) != t) return fail("sum parents must share a value type");
              }
              return t;
            }
            if (m.map == "constant") {
              if (!n.parents.empty()) return fail("constant takes no parents");
              if (!m.value) return fail("constant needs a value");
              if (const auto* d = std::get_if<double>(&*m.value)) {
                if (!std::isfinite(*d)) return fail("constant value must be finite");
                return ValueType{ValueKind::real, 0};
              }
              const auto& s = std::get<std::string>(*m.value);
              if (s.size() >= 3 && decimal::is_valid(s, static_cast<int>(s.size()) - 2)) {
                return ValueType{ValueKind::decimal, static_cast<int>(s.size()) - 2};
              }
              if (!s.empty() && bits::is_valid(s, static_cast<int>(s.size()))) {
                return ValueType{ValueKind::bitstring, static_cast<int>(s.size())};
              }
              return fail("constant string must be a decimal \"I.FFF\" or a 0/1 string");
            }
            return fail("unknown deterministic map '" + m.map + "'");
          }
        },
        n.mechanism);
  }

  std::vector<NodeSpec> nodes_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::size_t> order_;
  std::vector<ValueType> types_;
};

inline std::vector<std::string> topological_order(const CausalModel& model) { return model.order(); }

// ---------------------------------------------------------------------------
// Observations

struct Observation {
  std::map<std::string, NodeValue> values;
  std::map<std::string, Noise> noise;  // provenance; may be empty for ingested data

  const NodeValue& at(std::string_view id) const {
    const auto it = values.find(std::string(id));
    if (it == values.end()) throw DataError("observation has no value for node '" + std::string(id) + "'");
    return it->second;
  }

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline bool value_matches(const NodeValue& v, const ValueType& t) {
  if (t.kind == ValueKind::real) return std::holds_alternative<double>(v) && std::isfinite(std::get<double>(v));
  const auto* s = std::get_if<std::string>(&v);
  if (!s) return false;
  return t.kind == ValueKind::decimal ? decimal::is_valid(*s, t.width) : bits::is_valid(*s, t.width);
}

// Throws DataError unless every node has a value of its mechanism's type.
inline void validate_observation(const CausalModel& model, const Observation& obs) {
  for (const auto& n : model.nodes()) {
    if (!value_matches(obs.at(n.id), model.value_type(n.id))) {
      throw DataError("node '" + n.id + "': value '" + render(obs.at(n.id)) +
                      "' does not match its mechanism's value type");
    }
  }
}

// Parses a text field into the node's value type.
inline NodeValue parse_value(std::string_view text, const ValueType& t) {
  if (t.kind != ValueKind::real) return NodeValue{std::string(text)};
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw DataError("cannot parse '" + std::string(text) + "' as a real value");
  }
  return NodeValue{v};
}

// ---------------------------------------------------------------------------
// Random numbers
//
// The generator is std::mt19937_64 (bit-exact by the standard); uniforms,
// normals and digits are derived from its raw output here rather than through
// the library's distribution classes, whose algorithms are unspecified.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for trial i of a run seeded with `seed`: splitmix64(seed ^ i).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ index); }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Box-Muller; one normal per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform on {0, ..., n - 1} by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % n;
  }

  std::string digits(int count) {
    std::string s(static_cast<std::size_t>(count), '0');
    for (auto& c : s) c = static_cast<char>('0' + below(10));
    return s;
  }

  std::string bit_string(int count) {
    std::string s(static_cast<std::size_t>(count), '0');
    std::uint64_t word = 0;
    for (int i = 0; i < count; ++i) {
      if (i % 64 == 0) word = next();
      s[static_cast<std::size_t>(i)] = (word >> (i % 64)) & 1u ? '1' : '0';
    }
    return s;
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Sampling and propagation

namespace detail {

inline NodeValue evaluate_node(const NodeSpec& n, const std::vector<const NodeValue*>& parents,
                               const Noise& noise) {
  return std::visit(
      [&](const auto& m) -> NodeValue {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearGaussian>) {
          double v = std::get<double>(noise);
          for (std::size_t k = 0; k < parents.size(); ++k) v += m.coefficients[k] * std::get<double>(*parents[k]);
          return v;
        } else if constexpr (std::is_same_v<M, UniformDigits>) {
          std::string v = decimal::from_fraction(std::get<std::string>(noise));
          for (const NodeValue* p : parents) v = decimal::add(v, std::get<std::string>(*p));
          return v;
        } else if constexpr (std::is_same_v<M, UniformBits>) {
          return std::get<std::string>(noise);
        } else if constexpr (std::is_same_v<M, XorConst>) {
          return bits::xor_strings(std::get<std::string>(*parents[0]), m.constant);
        } else {
          if (m.map == "copy") return *parents[0];
          if (m.map == "negate") return -std::get<double>(*parents[0]);
          if (m.map == "constant") return *m.value;
          // sum
          if (std::holds_alternative<double>(*parents[0])) {
            double v = 0.0;
            for (const NodeValue* p : parents) v += std::get<double>(*p);
            return v;
          }
          std::string v = std::get<std::string>(*parents[0]);
          for (std::size_t k = 1; k < parents.size(); ++k) v = decimal::add(v, std::get<std::string>(*parents[k]));
          return v;
        }
      },
      n.mechanism);
}

inline Noise draw_noise(const NodeSpec& n, Rng& rng) {
  return std::visit(
      [&](const auto& m) -> Noise {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearGaussian>) {
          return m.noise_sd * rng.normal();
        } else if constexpr (std::is_same_v<M, UniformDigits>) {
          return rng.digits(m.digits);
        } else if constexpr (std::is_same_v<M, UniformBits>) {
          return rng.bit_string(m.bits);
        } else {
          return std::monostate{};
        }
      },
      n.mechanism);
}

inline bool noise_matches(const NodeSpec& n, const Noise& noise) {
  return std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearGaussian>) {
          return std::holds_alternative<double>(noise) && std::isfinite(std::get<double>(noise));
        } else if constexpr (std::is_same_v<M, UniformDigits>) {
          const auto* s = std::get_if<std::string>(&noise);
          return s && decimal::is_digits(*s, m.digits);
        } else if constexpr (std::is_same_v<M, UniformBits>) {
          const auto* s = std::get_if<std::string>(&noise);
          return s && bits::is_valid(*s, m.bits);
        } else {
          return std::holds_alternative<std::monostate>(noise);
        }
      },
      n.mechanism);
}

}  // namespace detail

// Computes every node value from a complete noise record, in topological order.
inline Observation propagate(const CausalModel& model, std::map<std::string, Noise> noise) {
  Observation obs;
  for (std::size_t i : model.order_indices()) {
    const NodeSpec& n = model.nodes()[i];
    auto it = noise.find(n.id);
    if (it == noise.end()) it = noise.emplace(n.id, Noise{}).first;
    if (!detail::noise_matches(n, it->second)) {
      throw ContractViolation("node '" + n.id + "': noise does not fit its mechanism");
    }
    std::vector<const NodeValue*> parents;
    for (const auto& p : n.parents) parents.push_back(&obs.values.at(p));
    obs.values.emplace(n.id, detail::evaluate_node(n, parents, it->second));
  }
  obs.noise = std::move(noise);
  return obs;
}

inline Observation sample_one(const CausalModel& model, Rng& rng) {
  std::map<std::string, Noise> noise;
  for (std::size_t i : model.order_indices()) {
    const NodeSpec& n = model.nodes()[i];
    noise.emplace(n.id, detail::draw_noise(n, rng));
  }
  return propagate(model, std::move(noise));
}

// Ancestral sampling; deterministic given the seed.
inline std::vector<Observation> sample(const CausalModel& model, std::uint64_t seed, std::size_t count) {
  detail::require(count > 0, "sample count must be positive");
  Rng rng(seed);
  std::vector<Observation> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sample_one(model, rng));
  return out;
}

// ---------------------------------------------------------------------------
// Anomaly injection

struct SetNoise {
  Noise value;
};

// Digit noise: the given digit followed by d - 1 zeros.
struct OneDigitNoise {
  int digit = 0;
};

using AnomalySpec = std::variant<SetNoise, OneDigitNoise>;

// Overrides one node's noise and re-propagates; every other node keeps its
// recorded noise, so only the node and its descendants can change.
inline Observation inject_anomaly(const CausalModel& model, const Observation& base, std::string_view node,
                                  const AnomalySpec& spec) {
  detail::require(model.contains(node), "unknown node '" + std::string(node) + "'");
  const NodeSpec& n = model.node(node);
  for (const auto& other : model.nodes()) {
    detail::require(base.noise.count(other.id) > 0,
                    "observation lacks the noise record for node '" + other.id + "'");
  }
  Noise replacement;
  if (const auto* one = std::get_if<OneDigitNoise>(&spec)) {
    const auto* digits = std::get_if<UniformDigits>(&n.mechanism);
    detail::require(digits != nullptr, "one_digit_noise needs a uniform_digits node");
    detail::require(one->digit >= 0 && one->digit <= 9, "one_digit_noise digit must be 0..9");
    replacement = std::string(1, static_cast<char>('0' + one->digit)) +
                  std::string(static_cast<std::size_t>(digits->digits - 1), '0');
  } else {
    replacement = std::get<SetNoise>(spec).value;
  }
  detail::require(!std::holds_alternative<std::monostate>(replacement) && detail::noise_matches(n, replacement),
                  "anomaly spec does not fit the mechanism of node '" + n.id + "'");
  auto noise = base.noise;
  noise[n.id] = std::move(replacement);
  return propagate(model, std::move(noise));
}

inline Observation inject_anomaly(const CausalModel& model, std::uint64_t seed, std::string_view node,
                                  const AnomalySpec& spec) {
  Rng rng(seed);
  return inject_anomaly(model, sample_one(model, rng), node, spec);
}

// ---------------------------------------------------------------------------
// Linear-Gaussian algebra

// X = A X + N with A strictly lower triangular and Var(N_i) = noise_variances(i).
class LinearSCM {
 public:
  LinearSCM(Eigen::MatrixXd coefficients, Eigen::VectorXd noise_variances)
      : a_(std::move(coefficients)), var_(std::move(noise_variances)) {
    detail::require(a_.rows() == a_.cols() && a_.rows() == var_.size(), "SCM dimensions disagree");
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      detail::require(var_(i) > 0.0 && std::isfinite(var_(i)), "noise variances must be positive");
      for (Eigen::Index j = i; j < a_.cols(); ++j) {
        detail::require(a_(i, j) == 0.0, "coefficient matrix must be strictly lower triangular");
      }
    }
    detail::require(a_.allFinite(), "coefficients must be finite");
  }

  const Eigen::MatrixXd& coefficients() const { return a_; }
  const Eigen::VectorXd& noise_variances() const { return var_; }
  Eigen::Index dim() const { return a_.rows(); }

  // (I - A) x, i.e. the noise that generated x.
  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const {
    detail::require(x.size() == dim(), "vector dimension does not match the SCM");
    return x - a_ * x;
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd var_;
};

// Linear-Gaussian models in topological order; every node must be linear_gaussian.
inline LinearSCM to_linear_scm(const CausalModel& model) {
  const auto& order = model.order_indices();
  const auto n = static_cast<Eigen::Index>(order.size());
  std::vector<Eigen::Index> position(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd var(n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const NodeSpec& node = model.nodes()[order[k]];
    const auto* lg = std::get_if<LinearGaussian>(&node.mechanism);
    if (lg == nullptr) throw ModelError("node '" + node.id + "' is not linear_gaussian");
    var(static_cast<Eigen::Index>(k)) = lg->noise_sd * lg->noise_sd;
    for (std::size_t p = 0; p < node.parents.size(); ++p) {
      a(static_cast<Eigen::Index>(k), position[model.index_of(node.parents[p])]) += lg->coefficients[p];
    }
  }
  return LinearSCM(std::move(a), std::move(var));
}

// Sigma_X = (I - A)^{-1} diag(sigma^2) (I - A)^{-T}.
inline Eigen::MatrixXd covariance(const LinearSCM& scm) {
  const Eigen::Index n = scm.dim();
  const Eigen::MatrixXd unit = Eigen::MatrixXd::Identity(n, n) - scm.coefficients();
  const Eigen::MatrixXd b = unit.triangularView<Eigen::UnitLower>().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd sigma = b * scm.noise_variances().asDiagonal() * b.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> spd_factor(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw NumericalError("covariance must be square and nonempty");
  if (!sigma.allFinite()) throw NumericalError("covariance has non-finite entries");
  const double scale = sigma.cwiseAbs().maxCoeff();
  if (!(sigma - sigma.transpose()).isZero(1e-12 * std::max(1.0, scale))) {
    throw NumericalError("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
  return llt;
}

inline void check_subset(std::span<const Eigen::Index> subset, Eigen::Index dim) {
  require(!subset.empty(), "subset must be nonempty");
  std::set<Eigen::Index> seen;
  for (Eigen::Index i : subset) {
    require(i >= 0 && i < dim, "subset index out of range");
    require(seen.insert(i).second, "subset indices must be distinct");
  }
}

}  // namespace detail

// x^T Sigma^{-1} x by Cholesky; throws NumericalError unless Sigma is SPD.
inline double mahalanobis_sq(const Eigen::VectorXd& x, const Eigen::MatrixXd& sigma) {
  const auto llt = detail::spd_factor(sigma);
  detail::require(x.size() == sigma.rows(), "vector dimension does not match the covariance");
  return llt.matrixL().solve(x).squaredNorm();
}

// Per-node noise scores n_i^2 / sigma_i^2 with n = (I - A) x; they sum to the
// squared Mahalanobis distance of x under covariance(scm).
inline Eigen::VectorXd noise_score_decomposition(const Eigen::VectorXd& x, const LinearSCM& scm) {
  const Eigen::VectorXd n = scm.residuals(x);
  return n.array().square() / scm.noise_variances().array();
}

inline Eigen::VectorXd subvector(const Eigen::VectorXd& x, std::span<const Eigen::Index> subset) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k) out(static_cast<Eigen::Index>(k)) = x(subset[k]);
  return out;
}

inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, std::span<const Eigen::Index> rows,
                                 std::span<const Eigen::Index> cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(rows[r], cols[c]);
    }
  }
  return out;
}

// Squared Mahalanobis distance of the marginal on `subset`.
inline double marginal_mahalanobis_sq(const Eigen::VectorXd& x, const Eigen::MatrixXd& sigma,
                                      std::span<const Eigen::Index> subset) {
  detail::check_subset(subset, sigma.rows());
  detail::require(x.size() == sigma.rows(), "vector dimension does not match the covariance");
  return mahalanobis_sq(subvector(x, subset), submatrix(sigma, subset, subset));
}

// The matrix C with x^T Sigma^{-1} x - x_1^T Sigma_11^{-1} x_1 = x^T C x,
// assembled from the block inverse as V S V^T where S is the inverse Schur
// complement of Sigma_11 and V = [Sigma_11^{-1} Sigma_12; -I]. Rows and
// columns are in the original index order; C is zero when subset is everything.
inline Eigen::MatrixXd marginalization_correction(const Eigen::MatrixXd& sigma, std::span<const Eigen::Index> subset) {
  detail::check_subset(subset, sigma.rows());
  detail::spd_factor(sigma);
  const Eigen::Index n = sigma.rows();
  std::vector<Eigen::Index> rest;
  {
    std::set<Eigen::Index> in(subset.begin(), subset.end());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!in.count(i)) rest.push_back(i);
    }
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  if (rest.empty()) return c;
  const Eigen::MatrixXd s11 = submatrix(sigma, subset, subset);
  const Eigen::MatrixXd s12 = submatrix(sigma, subset, rest);
  const Eigen::MatrixXd s22 = submatrix(sigma, rest, rest);
  const Eigen::LLT<Eigen::MatrixXd> llt11(s11);
  const Eigen::MatrixXd s11_inv_s12 = llt11.solve(s12);
  Eigen::MatrixXd schur = s22 - s12.transpose() * s11_inv_s12;
  schur = 0.5 * (schur + schur.transpose());
  const Eigen::MatrixXd schur_inv =
      schur.llt().solve(Eigen::MatrixXd::Identity(schur.rows(), schur.cols()));
  const auto k = static_cast<Eigen::Index>(subset.size());
  const auto r = static_cast<Eigen::Index>(rest.size());
  Eigen::MatrixXd v(k + r, r);
  v.topRows(k) = s11_inv_s12;
  v.bottomRows(r) = -Eigen::MatrixXd::Identity(r, r);
  Eigen::MatrixXd block = v * schur_inv * v.transpose();
  block = 0.5 * (block + block.transpose());
  std::vector<Eigen::Index> perm(subset.begin(), subset.end());
  perm.insert(perm.end(), rest.begin(), rest.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) c(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = block(i, j);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Reference models

namespace models {

// X_1 = N_1, X_j = X_{j-1} + N_j with N_j uniform on d-digit decimals in [0, 1).
inline CausalModel digit_chain(int n, int digits) {
  detail::require(n >= 1 && n <= 9, "digit chain length must be 1..9");
  std::vector<NodeSpec> nodes;
  for (int j = 1; j <= n; ++j) {
    NodeSpec s{"X" + std::to_string(j), {}, UniformDigits{digits}};
    if (j > 1) s.parents.push_back("X" + std::to_string(j - 1));
    nodes.push_back(std::move(s));
  }
  return CausalModel(std::move(nodes));
}

// X1 = N1, X2 = 2 X1 + N2, X3 = X1 - X2 + N3 with standard normal noise.
inline CausalModel three_node_gaussian() {
  return CausalModel({
      {"X1", {}, LinearGaussian{{}, 1.0}},
      {"X2", {"X1"}, LinearGaussian{{2.0}, 1.0}},
      {"X3", {"X1", "X2"}, LinearGaussian{{1.0, -1.0}, 1.0}},
  });
}

// X uniform on {0,1}^d, Y = X XOR x0.
inline CausalModel xor_pair(std::string x0) {
  const int d = static_cast<int>(x0.size());
  return CausalModel({
      {"X", {}, UniformBits{d}},
      {"Y", {"X"}, XorConst{std::move(x0)}},
  });
}

}  // namespace models
}  // namespace ait

#endif  // AIT_CAUSAL_HPP_
