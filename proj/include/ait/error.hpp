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

#ifndef AIT_ERROR_HPP_
#define AIT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ait {

// A caller broke a documented precondition (wrong test kind, empty input,
// separator byte in a payload, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A causal model failed validation (cycle, unknown parent, bad parameters).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Observed data does not fit the model it is scored against.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not proceed (non positive-definite matrix, ...).
class NumericalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace detail
}  // namespace ait

#endif  // AIT_ERROR_HPP_
