/**
 * Copyright 2026 The dicke-lqg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dicke {

/// Bad user input: out-of-range (n,k), violated splitting constraint, malformed file.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An expansion grew past the configured monomial budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::size_t budget, std::size_t reached)
      : std::runtime_error("term budget exceeded: " + std::to_string(reached) +
                           " monomials > budget " + std::to_string(budget)),
        budget_(budget),
        reached_(reached) {}
  std::size_t budget() const noexcept { return budget_; }
  std::size_t reached() const noexcept { return reached_; }

 private:
  std::size_t budget_;
  std::size_t reached_;
};

/// Two routes that must agree did not (simulation vs closed form, etc).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value has no representation in the exact coefficient field.
class NotRepresentable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace dicke
