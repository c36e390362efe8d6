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

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dicke/circuit_compiler.hpp"
#include "dicke/closed_form.hpp"
#include "dicke/errors.hpp"
#include "dicke/fock_algebra.hpp"
#include "dicke/sculpting_engine.hpp"

namespace dicke {

/// Factored state after every step: element [s-1] is the state after step s.
template <class S>
std::vector<FactoredState<S>> evolve_steps(const OpticalCircuit<S>& c, const FactoredState<S>& in) {
  std::vector<FactoredState<S>> out{in};
  auto st = in;
  for (int step = 2; step <= 5; ++step) {
    for (const auto& e : c.layers)
      if (e.step == step) st = apply_element(c, st, e);
    out.push_back(st);
  }
  return out;
}

template <class S>
FactoredState<S> evolve_factored(const OpticalCircuit<S>& c, const FactoredState<S>& in) {
  auto st = in;
  for (const auto& e : c.layers) st = apply_element(c, st, e);
  return st;
}

/// Applies every element to an already expanded polynomial.
template <class S>
FockPolynomial<S> evolve(const OpticalCircuit<S>& c, const FockPolynomial<S>& in) {
  auto st = in;
  for (const auto& e : c.layers) st = apply_element(c, st, e);
  return st;
}

/**
 * Keeps monomials with at most one photon per detector group and per output
 * pair. The predicate is monotone, so it may prune partial products.
 */
template <class S>
MonomialFilter herald_filter(const OpticalCircuit<S>& c) {
  auto group = std::make_shared<std::unordered_map<std::uint32_t, std::uint16_t>>();
  std::uint16_t g = 0;
  for (const auto& dg : c.detector_groups) {
    for (auto id : dg.modes) (*group)[c.label(id).packed()] = g;
    ++g;
  }
  for (const auto& [a, b] : c.qubits) {
    (*group)[c.label(a).packed()] = g;
    (*group)[c.label(b).packed()] = g;
    ++g;
  }
  const std::size_t groups = g;
  return [group, groups](const Monomial& m) {
    std::uint64_t seen_lo = 0;
    std::vector<bool> seen_hi;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto e = m.entry(i);
      if (e.exponent > 1) return false;
      auto it = group->find(e.label.packed());
      if (it == group->end()) continue;
      const std::size_t gi = it->second;
      if (gi < 64) {
        if (seen_lo >> gi & 1u) return false;
        seen_lo |= std::uint64_t{1} << gi;
      } else {
        if (seen_hi.empty()) seen_hi.assign(groups, false);
        if (seen_hi[gi]) return false;
        seen_hi[gi] = true;
      }
    }
    return true;
  };
}

/// Swap mask and per-qubit phases that map a heralded state onto D_n^k.
template <class S>
struct FeedForward {
  std::vector<bool> swap;  // exchange the two rails of qubit m
  std::vector<S> phase;    // multiply |1_L> of qubit m by conj(phase[m])
};

template <class S>
struct HeraldOutcome {
  std::vector<std::uint8_t> pattern;  // photon count per detector, in circuit.detectors order
  FockPolynomial<S> conditional_state;  // unnormalized, over output modes
  S weight{};                           // norm of the dual-rail part
  S total_probability{};                // norm of the whole conditional state
  bool dual_rail_valid = false;
  bool correctable = false;
  bool in_family = false;
  bool accepted = false;
  bool canonical = false;
  std::optional<FeedForward<S>> feedforward;
  S corrected_fidelity{};
};

namespace sim_detail {

template <class S>
bool near(const S& a, const S& b, double tol) {
  if constexpr (ScalarTraits<S>::kExact)
    return a == b;
  else
    return std::abs(a - b) <= tol;
}

/// Bits of every term (bit m-1 set for |1_L> of qubit m); empty if any term is not a dual-rail string.
template <class S>
std::optional<std::map<std::uint64_t, S>> dual_rail_amplitudes(const OpticalCircuit<S>& c,
                                                               const FockPolynomial<S>& p) {
  std::unordered_map<std::uint32_t, std::pair<unsigned, int>> qubit_of;
  for (unsigned m = 0; m < c.qubits.size(); ++m) {
    qubit_of[c.label(c.qubits[m].first).packed()] = {m, 0};
    qubit_of[c.label(c.qubits[m].second).packed()] = {m, 1};
  }
  std::map<std::uint64_t, S> out;
  for (const auto& [mono, coef] : p.terms()) {
    if (mono.size() != c.qubits.size()) return std::nullopt;
    std::uint64_t bits = 0, present = 0;
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const auto e = mono.entry(i);
      auto it = qubit_of.find(e.label.packed());
      if (it == qubit_of.end() || e.exponent != 1) return std::nullopt;
      const auto [m, b] = it->second;
      if (present >> m & 1u) return std::nullopt;
      present |= std::uint64_t{1} << m;
      if (b) bits |= std::uint64_t{1} << m;
    }
    out[bits] = coef;
  }
  return out;
}

}  // namespace sim_detail

/**
 * Searches rail swaps and phases turning the heralded amplitudes into a
 * uniform weight-k superposition. Returns nullopt when no local correction exists.
 */
template <class S>
std::optional<FeedForward<S>> find_feedforward(const OpticalCircuit<S>& c, const FockPolynomial<S>& cond,
                                               double tol = 1e-10) {
  using T = ScalarTraits<S>;
  const unsigned n = c.n, k = c.k;
  if (n > 20) throw ValidationError("feed-forward search supports n <= 20");
  auto amps = sim_detail::dual_rail_amplitudes(c, cond);
  if (!amps || amps->empty()) return std::nullopt;
  if (BigInt(static_cast<unsigned long>(amps->size())) != binomial(n, k)) return std::nullopt;
  double scale = 0.0;
  for (const auto& [b, a] : *amps) scale = std::max(scale, std::abs(T::to_complex(a)));
  const double atol = tol * scale;

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool ok = true;
    for (const auto& [b, a] : *amps)
      if (unsigned(__builtin_popcountll(b ^ mask)) != k) {
        ok = false;
        break;
      }
    if (!ok) continue;
    auto amp = [&](std::uint64_t y) { return amps->at(y ^ mask); };
    FeedForward<S> ff;
    ff.swap.resize(n);
    for (unsigned m = 0; m < n; ++m) ff.swap[m] = (mask >> m & 1u) != 0;
    ff.phase.assign(n, T::from_int(1));
    const std::uint64_t y0 = (std::uint64_t{1} << k) - 1;
    const S c0 = amp(y0);
    if (k > 0 && k < n) {
      // phase[0] = 1; qubits outside y0 from y0 - e0 + em, the rest from y0 - ei + e_k
      for (unsigned m = k; m < n; ++m) ff.phase[m] = amp((y0 & ~std::uint64_t{1}) | (std::uint64_t{1} << m)) / c0;
      for (unsigned i = 1; i < k; ++i)
        ff.phase[i] = ff.phase[k] * c0 / amp((y0 & ~(std::uint64_t{1} << i)) | (std::uint64_t{1} << k));
    }
    bool unit = true;
    for (const auto& t : ff.phase)
      if (!sim_detail::near(T::abs2(t), T::from_int(1), tol)) unit = false;
    if (!unit) return std::nullopt;
    S prod0 = T::from_int(1);
    for (unsigned m = 0; m < k; ++m) prod0 *= ff.phase[m];
    for (const auto& [b, a] : *amps) {
      const std::uint64_t y = b ^ mask;
      S prod = T::from_int(1);
      for (unsigned m = 0; m < n; ++m)
        if (y >> m & 1u) prod *= ff.phase[m];
      if (!sim_detail::near(a * prod0, c0 * prod, atol)) return std::nullopt;
    }
    return ff;
  }
  return std::nullopt;
}

/// Applies swaps and phases, returning the corrected state over output rails.
template <class S>
FockPolynomial<S> apply_feedforward(const OpticalCircuit<S>& c, const FockPolynomial<S>& cond,
                                    const FeedForward<S>& ff) {
  auto amps = sim_detail::dual_rail_amplitudes(c, cond);
  if (!amps) throw ValidationError("state is not a dual-rail state");
  FockPolynomial<S> out;
  for (const auto& [b, a] : *amps) {
    std::vector<Monomial::Entry> e;
    S coef = a;
    for (unsigned m = 0; m < c.n; ++m) {
      const bool bit = ((b >> m & 1u) != 0) != ff.swap[m];
      if (bit) coef *= ScalarTraits<S>::conj(ff.phase[m]);
      e.push_back({qubit_mode(m + 1, bit, QubitEncoding::DualRail), 1});
    }
    out.add_term(Monomial::from_entries(std::move(e)), coef);
  }
  return out;
}

/**
 * One click in every S group at a common port q, one in every T group at a
 * common port p, and one in every system pair.
 */
template <class S>
bool in_feedforward_family(const OpticalCircuit<S>& c, const std::vector<std::uint8_t>& pattern) {
  std::size_t pos = 0;
  std::optional<std::size_t> q, p;
  for (const auto& g : c.detector_groups) {
    std::size_t clicks = 0, port = 0;
    for (std::size_t i = 0; i < g.modes.size(); ++i) {
      if (pattern[pos + i] == 1) port = i;
      clicks += pattern[pos + i];
    }
    pos += g.modes.size();
    if (clicks != 1) return false;
    if (g.kind == DetectorGroupKind::SBranch) {
      if (q && *q != port) return false;
      q = port;
    } else if (g.kind == DetectorGroupKind::TBranch) {
      if (p && *p != port) return false;
      p = port;
    }
  }
  return true;
}

/// Pattern with every S and T click on port 0 and every system click on (m,0,1).
template <class S>
std::vector<std::uint8_t> canonical_pattern(const OpticalCircuit<S>& c) {
  std::vector<std::uint8_t> p(c.detectors.size(), 0);
  std::size_t pos = 0;
  for (const auto& g : c.detector_groups) {
    p[pos] = 1;
    pos += g.modes.size();
  }
  return p;
}

/// Splits the output state by detector pattern and evaluates the feed-forward on each.
template <class S>
std::vector<HeraldOutcome<S>> herald(const OpticalCircuit<S>& c, const FockPolynomial<S>& out) {
  using T = ScalarTraits<S>;
  std::unordered_map<std::uint32_t, std::size_t> det_pos;
  for (std::size_t i = 0; i < c.detectors.size(); ++i) det_pos[c.label(c.detectors[i]).packed()] = i;
  std::map<std::vector<std::uint8_t>, FockPolynomial<S>> by_pattern;
  std::vector<std::uint8_t> pattern(c.detectors.size());
  std::vector<Monomial::Entry> rest;
  for (const auto& [mono, coef] : out.terms()) {
    std::fill(pattern.begin(), pattern.end(), 0);
    rest.clear();
    long det_factorial = 1;
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const auto e = mono.entry(i);
      auto it = det_pos.find(e.label.packed());
      if (it == det_pos.end()) {
        rest.push_back({e.label, e.exponent});
        continue;
      }
      if (e.exponent > 255) throw ValidationError("detector count overflow");
      pattern[it->second] = static_cast<std::uint8_t>(e.exponent);
      for (std::uint32_t f = 2; f <= e.exponent; ++f) det_factorial *= long(f);
    }
    S amp = coef;
    if (det_factorial != 1) amp *= T::sqrt_rational(Rational(det_factorial));
    by_pattern[pattern].add_term(Monomial::from_entries(rest), amp);
  }

  const auto canon = canonical_pattern(c);
  std::vector<HeraldOutcome<S>> res;
  res.reserve(by_pattern.size());
  for (auto& [pat, cond] : by_pattern) {
    if (cond.is_zero()) continue;
    HeraldOutcome<S> h;
    h.pattern = pat;
    h.conditional_state = std::move(cond);
    h.total_probability = norm2(h.conditional_state);
    h.dual_rail_valid = sim_detail::dual_rail_amplitudes(c, h.conditional_state).has_value();
    h.weight = h.dual_rail_valid ? h.total_probability : S{};
    h.in_family = in_feedforward_family(c, pat);
    h.canonical = pat == canon;
    if (h.dual_rail_valid) h.feedforward = find_feedforward(c, h.conditional_state);
    h.correctable = h.feedforward.has_value();
    h.accepted = h.correctable && h.in_family;
    if (h.correctable)
      h.corrected_fidelity = fidelity_with_dicke(apply_feedforward(c, h.conditional_state, *h.feedforward), c.n,
                                                 c.k, QubitEncoding::DualRail);
    res.push_back(std::move(h));
  }
  return res;
}

enum class Backend { Exact, Float, Auto };

inline const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Exact: return "exact";
    case Backend::Float: return "float";
    default: return "auto";
  }
}

struct SimulateOptions {
  Backend backend = Backend::Auto;
  std::optional<double> alpha, beta;
  std::size_t budget = 100000000;
  std::optional<bool> filtered;  // default: filter from n >= 3
  bool graph_check = true;       // only run for n <= 5
  bool record_patterns = false;  // keep one PatternRow per heralding pattern
};

struct PatternRow {
  std::string pattern;  // detector counts, one digit per detector
  double weight = 0.0;
  bool accepted = false;
  std::optional<double> fidelity;  // corrected fidelity when correctable
};

struct SchemeReport {
  unsigned n = 0, k = 0;
  double alpha = 0.0, beta = 0.0;
  bool optimal_splitting = true;
  std::string backend;
  bool filtered = false;
  std::size_t output_terms = 0;
  std::size_t pattern_count = 0;

  std::optional<std::size_t> dcc_count;
  std::optional<double> graph_fidelity;

  double circuit_fidelity = 0.0;  // worst corrected fidelity over accepted patterns
  double single_pattern_amplitude = 0.0;
  double single_pattern_amplitude_closed_form = 0.0;
  std::size_t accepted_pattern_count = 0;
  std::string feedforward_factor;
  std::size_t correctable_pattern_count = 0;
  double p_success_simulated = 0.0;
  double p_success_closed_form = 0.0;
  double p_success_correctable = 0.0;
  double relative_error = 0.0;
  std::optional<bool> exact_match;  // exact backend: P equals the rational closed form
  std::optional<double> total_probability;  // unfiltered runs only
  double seconds = 0.0;
  std::vector<PatternRow> patterns;

  bool passed(double rel_tol = 1e-9) const {
    return relative_error <= rel_tol && circuit_fidelity >= 1.0 - 1e-10 &&
           BigInt(static_cast<unsigned long>(accepted_pattern_count)) == BigInt(feedforward_factor) &&
           exact_match.value_or(true);
  }
};

namespace sim_detail {

template <class S>
void fill_report(SchemeReport& r, const OpticalCircuit<S>& c, const std::vector<HeraldOutcome<S>>& outcomes,
                 bool record) {
  using T = ScalarTraits<S>;
  if (record) {
    for (const auto& h : outcomes) {
      PatternRow row;
      for (auto x : h.pattern) row.pattern += std::to_string(int(x));
      row.weight = T::real(h.weight);
      row.accepted = h.accepted;
      if (h.correctable) row.fidelity = T::real(h.corrected_fidelity);
      r.patterns.push_back(std::move(row));
    }
  }
  S p_acc{}, p_corr{}, total{};
  double worst = 1.0;
  bool any = false;
  for (const auto& h : outcomes) {
    total += h.total_probability;
    if (h.correctable) {
      ++r.correctable_pattern_count;
      p_corr += h.weight;
    }
    if (h.accepted) {
      ++r.accepted_pattern_count;
      p_acc += h.weight;
      worst = std::min(worst, T::real(h.corrected_fidelity));
      any = true;
    }
    if (h.canonical) r.single_pattern_amplitude = std::sqrt(T::real(h.weight));
  }
  r.circuit_fidelity = any ? worst : 0.0;
  r.p_success_simulated = T::real(p_acc);
  r.p_success_correctable = T::real(p_corr);
  if (!r.filtered) r.total_probability = T::real(total);
  if constexpr (T::kExact) {
    if (r.optimal_splitting) {
      const auto exact = success_probability_exact(c.n, c.k);
      r.exact_match = p_acc.is_rational() && p_acc.to_rational() == exact;
    }
  }
}

}  // namespace sim_detail

/**
 * Compiles the circuit for (n, k), propagates the input photons, heralds every
 * detector pattern and compares the accepted probability with the closed form.
 */
inline SchemeReport simulate_scheme(unsigned n, unsigned k, const SimulateOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_nk(n, k, false);
  const auto best = optimal_splitting(n, k);
  SchemeReport r;
  r.n = n;
  r.k = k;
  r.alpha = opt.alpha.value_or(best.alpha);
  r.beta = opt.beta.value_or(best.beta);
  if (!(r.alpha >= 0.0) || !(r.beta >= 0.0) || std::abs(k * r.alpha * r.alpha + r.beta * r.beta - 1.0) > 1e-9)
    throw ValidationError("splitting amplitudes must satisfy k alpha^2 + beta^2 = 1");
  r.optimal_splitting = std::abs(r.alpha - best.alpha) < 1e-12 && std::abs(r.beta - best.beta) < 1e-12;

  auto exact_dims_ok = [&] { return 24 % n == 0 && 24 % (k + 1) == 0; };
  Backend b = opt.backend;
  if (b == Backend::Exact) {
    if (!r.optimal_splitting) throw ValidationError("the exact backend uses the optimal splitting amplitudes");
    if (!exact_dims_ok()) throw NotRepresentable("exact backend needs n and k+1 dividing 24");
  }
  if (b == Backend::Auto) b = (r.optimal_splitting && exact_dims_ok() && n <= 3) ? Backend::Exact : Backend::Float;
  r.backend = backend_name(b);
  r.filtered = opt.filtered.value_or(n >= 3);

  if (opt.graph_check && n <= 5) {
    const auto g = verify_dicke_graph<ExactScalar>(n, k, DickeWeights::optimal(n, k));
    r.dcc_count = g.dcc_count;
    r.graph_fidelity = g.fidelity_value;
  }

  r.feedforward_factor = feedforward_factor(n, k).get_str();
  r.single_pattern_amplitude_closed_form = canonical_amplitude(n, k, r.alpha, r.beta);
  r.p_success_closed_form = r.optimal_splitting
                                ? success_probability_closed_form(n, k)
                                : feedforward_factor(n, k).get_d() * std::pow(r.single_pattern_amplitude_closed_form, 2);

  auto run = [&](const auto& circuit) {
    ExpandOptions eo;
    eo.budget = opt.budget;
    if (r.filtered) eo.keep = herald_filter(circuit);
    const auto out = evolve_factored(circuit, input_state(circuit)).expand(eo);
    r.output_terms = out.size();
    const auto outcomes = herald(circuit, out);
    r.pattern_count = outcomes.size();
    sim_detail::fill_report(r, circuit, outcomes, opt.record_patterns);
  };
  if (b == Backend::Exact)
    run(compile_optimal<ExactScalar>(n, k));
  else
    run(compile(n, k, r.alpha, r.beta));

  r.relative_error = std::abs(r.p_success_simulated - r.p_success_closed_form) / r.p_success_closed_form;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace dicke
