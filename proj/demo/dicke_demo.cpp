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

// Walks through the (n,k) = (4,2) scheme: graph, circuit, heralded simulation.

#include <cstdio>

#include "dicke/dicke.hpp"

int main() {
  using namespace dicke;
  const unsigned n = 4, k = 2;

  const auto v = verify_dicke_graph<ExactScalar>(n, k);
  std::printf("graph: %zu cycle covers (formula %s), %zu perfect matchings, fidelity %s\n", v.dcc_count,
              v.dcc_formula.get_str().c_str(), v.matching_count, v.fidelity.is_rational() ? v.fidelity.to_rational().get_str().c_str() : v.fidelity.to_string().c_str());

  const auto c = compile_optimal<Complex>(n, k);
  std::printf("circuit: %zu modes, %zu layers, unitarity defect %.2e\n", c.mode_count(), c.layers.size(),
              circuit_unitary(c).unitarity_defect());

  const auto r = simulate_scheme(n, k, {.backend = Backend::Float, .graph_check = false});
  std::printf("simulation: %zu accepted patterns (expected %s), P = %.6e, closed form %.6e, min fidelity %.12f\n",
              r.accepted_pattern_count, r.feedforward_factor.c_str(), r.p_success_simulated, r.p_success_closed_form,
              r.circuit_fidelity);

  std::printf("success probability for k = 2:");
  for (unsigned m = 2; m <= 8; ++m) std::printf(" n=%u %.3e", m, success_probability_closed_form(m, 2));
  std::printf("\n");
  return r.passed() ? 0 : 1;
}
