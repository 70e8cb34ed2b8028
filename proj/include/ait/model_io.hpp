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

// JSON model files:
//
//   {"nodes": [{"id": "X1", "parents": [],
//               "mechanism": {"kind": "uniform_digits", "params": {"digits": 10}}}, ...]}
//
// Mechanism params by kind (see docs/model_format.md):
//   linear_gaussian  {"coefficients": {"<parent>": a, ...}, "noise_sd": s}
//   uniform_digits   {"digits": d}
//   uniform_bits     {"bits": d}
//   xor_const        {"constant": "0110..."}
//   deterministic    {"map": "copy" | "sum" | "negate" | "constant", "value": v}

#ifndef AIT_MODEL_IO_HPP_
#define AIT_MODEL_IO_HPP_

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ait/causal.hpp"
#include "ait/error.hpp"

namespace ait {

namespace detail {

using nlohmann::json;

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  throw ModelError(path + ": " + what);
}

inline const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) field_error(path + "." + key, "missing");
  return obj.at(key);
}

inline double number_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number()) field_error(path + "." + key, "expected a number");
  return v.get<double>();
}

inline int int_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number_integer()) field_error(path + "." + key, "expected an integer");
  return v.get<int>();
}

inline std::string string_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) field_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline MechanismSpec mechanism_from_json(const json& m, const std::vector<std::string>& parents,
                                         const std::string& path) {
  const std::string kind = string_field(m, "kind", path);
  const json empty = json::object();
  const json& params = m.contains("params") ? m.at("params") : empty;
  const std::string ppath = path + ".params";
  if (!params.is_object()) field_error(ppath, "expected an object");
  if (kind == "linear_gaussian") {
    LinearGaussian lg;
    lg.noise_sd = number_field(params, "noise_sd", ppath);
    const json coef = params.contains("coefficients") ? params.at("coefficients") : json::object();
    if (!coef.is_object()) field_error(ppath + ".coefficients", "expected an object keyed by parent id");
    for (const auto& p : parents) {
      if (!coef.contains(p)) field_error(ppath + ".coefficients." + p, "missing coefficient for parent");
      if (!coef.at(p).is_number()) field_error(ppath + ".coefficients." + p, "expected a number");
      lg.coefficients.push_back(coef.at(p).get<double>());
    }
    for (const auto& [key, _] : coef.items()) {
      if (std::find(parents.begin(), parents.end(), key) == parents.end()) {
        field_error(ppath + ".coefficients." + key, "not a parent of this node");
      }
    }
    return lg;
  }
  if (kind == "uniform_digits") return UniformDigits{int_field(params, "digits", ppath)};
  if (kind == "uniform_bits") return UniformBits{int_field(params, "bits", ppath)};
  if (kind == "xor_const") return XorConst{string_field(params, "constant", ppath)};
  if (kind == "deterministic") {
    Deterministic d{string_field(params, "map", ppath), std::nullopt};
    if (params.contains("value")) {
      const json& v = params.at("value");
      if (v.is_number()) {
        d.value = v.get<double>();
      } else if (v.is_string()) {
        d.value = v.get<std::string>();
      } else {
        field_error(ppath + ".value", "expected a number or a string");
      }
    }
    return d;
  }
  field_error(path + ".kind", "unknown mechanism kind '" + kind + "'");
}

}  // namespace detail

inline CausalModel model_from_json(const nlohmann::json& doc) {
  using detail::json;
  if (!doc.is_object() || !doc.contains("nodes")) detail::field_error("nodes", "missing");
  const json& nodes = doc.at("nodes");
  if (!nodes.is_array()) detail::field_error("nodes", "expected an array");
  std::vector<NodeSpec> specs;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const json& n = nodes.at(i);
    NodeSpec spec;
    spec.id = detail::string_field(n, "id", path);
    if (n.contains("parents")) {
      const json& ps = n.at("parents");
      if (!ps.is_array()) detail::field_error(path + ".parents", "expected an array");
      for (const auto& p : ps) {
        if (!p.is_string()) detail::field_error(path + ".parents", "expected node ids");
        spec.parents.push_back(p.get<std::string>());
      }
    }
    spec.mechanism = detail::mechanism_from_json(detail::field(n, "mechanism", path), spec.parents, path + ".mechanism");
    specs.push_back(std::move(spec));
  }
  return CausalModel(std::move(specs));
}

inline CausalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError(path + ": cannot open model file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(path + ": " + e.what());
  }
  return model_from_json(doc);
}

inline nlohmann::ordered_json model_to_json(const CausalModel& model) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& n : model.nodes()) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, LinearGaussian>) {
            nlohmann::ordered_json coef = nlohmann::ordered_json::object();
            for (std::size_t k = 0; k < n.parents.size(); ++k) coef[n.parents[k]] = m.coefficients[k];
            params["coefficients"] = coef;
            params["noise_sd"] = m.noise_sd;
          } else if constexpr (std::is_same_v<M, UniformDigits>) {
            params["digits"] = m.digits;
          } else if constexpr (std::is_same_v<M, UniformBits>) {
            params["bits"] = m.bits;
          } else if constexpr (std::is_same_v<M, XorConst>) {
            params["constant"] = m.constant;
          } else {
            params["map"] = m.map;
            if (m.value) {
              std::visit([&](const auto& v) { params["value"] = v; }, *m.value);
            }
          }
        },
        n.mechanism);
    nodes.push_back({{"id", n.id},
                     {"parents", n.parents},
                     {"mechanism", {{"kind", std::string(mechanism_kind(n.mechanism))}, {"params", params}}}});
  }
  return nlohmann::ordered_json{{"nodes", nodes}};
}

}  // namespace ait

#endif  // AIT_MODEL_IO_HPP_
