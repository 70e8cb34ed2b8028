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

// Observation CSV: header row of node ids in topological order, one row per
// observation. String values (digit and bit strings) are always quoted;
// reals use the shortest round-trip decimal form.

#ifndef AIT_OBSERVATION_CSV_HPP_
#define AIT_OBSERVATION_CSV_HPP_

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "ait/causal.hpp"
#include "ait/error.hpp"

namespace ait {

namespace detail {

// Splits one CSV record; quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else if (ch != '\r') {
      fields.back() += ch;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  return fields;
}

}  // namespace detail

inline void write_observations_csv(const CausalModel& model, const std::vector<Observation>& rows, std::ostream& out) {
  const auto ids = model.order();
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
  out << '\n';
  for (const auto& obs : rows) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out << ',';
      const NodeValue& v = obs.at(ids[i]);
      if (std::holds_alternative<std::string>(v)) {
        out << '"' << std::get<std::string>(v) << '"';
      } else {
        out << render(v);
      }
    }
    out << '\n';
  }
}

// Reads observations for `model`. Throws DataError on an empty input, on a
// header that does not list exactly the model's nodes, and on bad values.
inline std::vector<Observation> read_observations_csv(const CausalModel& model, std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.find_first_not_of(" \r") == std::string::npos) {
    throw DataError("data file is empty");
  }
  const auto header = detail::split_csv_line(line);
  std::set<std::string> seen;
  std::vector<std::string> extra, missing;
  for (const auto& h : header) {
    if (!seen.insert(h).second) throw DataError("duplicate column '" + h + "'");
    if (!model.contains(h)) extra.push_back(h);
  }
  for (const auto& id : model.order()) {
    if (!seen.count(id)) missing.push_back(id);
  }
  if (!extra.empty() || !missing.empty()) {
    std::string msg = "columns do not match model nodes;";
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
      return s;
    };
    if (!missing.empty()) msg += " missing: " + join(missing) + ";";
    if (!extra.empty()) msg += " extra: " + join(extra) + ";";
    throw DataError(msg);
  }
  std::vector<Observation> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r") == std::string::npos) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    Observation obs;
    for (std::size_t i = 0; i < header.size(); ++i) {
      try {
        obs.values.emplace(header[i], parse_value(fields[i], model.value_type(header[i])));
      } catch (const DataError& e) {
        throw DataError("line " + std::to_string(line_no) + ", column '" + header[i] + "': " + e.what());
      }
    }
    try {
      validate_observation(model, obs);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(std::move(obs));
  }
  if (rows.empty()) throw DataError("data file has no observation rows");
  return rows;
}

}  // namespace ait

#endif  // AIT_OBSERVATION_CSV_HPP_
