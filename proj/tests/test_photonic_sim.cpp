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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dicke/permanent.hpp"
#include "dicke/photonic_sim.hpp"
#include "oracles.hpp"

using namespace dicke;
using E = ExactScalar;

namespace {

Rational to_mpq(const oracle::BigRational& r) {
  std::ostringstream os;
  os << r;
  Rational q(os.str());
  q.canonicalize();
  return q;
}

// Heralded-style state over the (n,k) output rails with the given amplitude per weight-k string.
template <class S, class F>
FockPolynomial<S> rail_state(unsigned n, unsigned k, F amp) {
  FockPolynomial<S> p;
  for_each_weight_k(n, k, [&](const std::vector<int>& bits) {
    std::vector<Monomial::Entry> e;
    for (unsigned m = 0; m < n; ++m) e.push_back({qubit_mode(m + 1, bits[m], QubitEncoding::DualRail), 1});
    p.add_term(Monomial::from_entries(std::move(e)), amp(bits));
  });
  return p;
}

}  // namespace

TEST(ClosedForm, KnownValues) {
  EXPECT_EQ(success_probability_exact(2, 1), Rational(1, 128));
  EXPECT_EQ(success_probability_exact(4, 2), Rational(384) / Rational(113246208));
  EXPECT_EQ(feedforward_factor(4, 2), BigInt(192));
  EXPECT_EQ(feedforward_factor(3, 1), BigInt(48));
  EXPECT_THROW(success_probability_exact(3, 0), ValidationError);
  EXPECT_THROW(success_probability_exact(2, 3), ValidationError);
}

TEST(ClosedForm, MatchesIndependentOracle) {
  for (unsigned n = 1; n <= 12; ++n)
    for (unsigned k = 1; k <= n; ++k)
      EXPECT_EQ(success_probability_exact(n, k), to_mpq(oracle::success_probability(n, k))) << n << "," << k;
}

TEST(ClosedForm, AmplitudeTimesFactorGivesProbability) {
  for (unsigned n = 2; n <= 8; ++n)
    for (unsigned k = 1; k < n; ++k) {
      const auto s = optimal_splitting(n, k);
      const Rational a2 = canonical_amplitude_squared(n, k, s.alpha2, s.beta2);
      EXPECT_EQ(a2 * Rational(feedforward_factor(n, k)), success_probability_exact(n, k));
      const double a = canonical_amplitude(n, k, s.alpha, s.beta);
      EXPECT_NEAR(a * a / a2.get_d(), 1.0, 1e-12);
    }
}

TEST(ClosedForm, OptimalSplittingMaximizes) {
  for (unsigned n = 2; n <= 10; ++n)
    for (unsigned k = 1; k < n; ++k) {
      const auto s = optimal_splitting(n, k);
      const auto [a, b] = oracle::maximize_splitting(n, k);
      EXPECT_NEAR(s.alpha, a, 1e-6);
      EXPECT_NEAR(s.beta, b, 1e-6);
      EXPECT_NEAR(k * s.alpha * s.alpha + s.beta * s.beta, 1.0, 1e-15);
    }
  EXPECT_THROW(canonical_amplitude(3, 1, 0.9, 0.9), ValidationError);
}

TEST(Feedforward, PhasesAndSwapsRecovered) {
  const auto c = compile_optimal<E>(3, 1);
  // |0_L> on qubit 2 swapped, phases omega_3^j on |1_L>
  auto raw = rail_state<E>(3, 1, [](const std::vector<int>& bits) {
    E a = E::rational(1, 7);
    for (unsigned m = 0; m < 3; ++m)
      if (bits[m]) a *= E::root_of_unity(long(m), 3);
    return a;
  });
  const auto ff0 = find_feedforward(c, raw);
  ASSERT_TRUE(ff0.has_value());
  EXPECT_EQ(fidelity_with_dicke(apply_feedforward(c, raw, *ff0), 3, 1, QubitEncoding::DualRail), E(1L));

  LinearSubstitution<E> flip;
  flip.set(ModeLabel::rail(2, 0, 0), {{ModeLabel::rail(2, 1, 1), E(1L)}});
  flip.set(ModeLabel::rail(2, 1, 1), {{ModeLabel::rail(2, 0, 0), E(1L)}});
  const auto swapped = substitute(raw, flip);
  const auto ff = find_feedforward(c, swapped);
  ASSERT_TRUE(ff.has_value());
  EXPECT_EQ(ff->swap, (std::vector<bool>{false, true, false}));
  EXPECT_EQ(fidelity_with_dicke(apply_feedforward(c, swapped, *ff), 3, 1, QubitEncoding::DualRail), E(1L));
}

TEST(Feedforward, RejectsUncorrectableStates) {
  const auto c = compile_optimal<E>(3, 1);
  // unequal magnitudes
  auto skew = rail_state<E>(3, 1, [](const std::vector<int>& bits) { return bits[0] ? E(2L) : E(1L); });
  EXPECT_FALSE(find_feedforward(c, skew).has_value());
  // with 3 strings and 3 free phases every k = 2 phase pattern on 3 qubits factorizes
  const auto c32 = compile_optimal<E>(3, 2);
  auto three = rail_state<E>(3, 2, [](const std::vector<int>& bits) {
    return (bits[0] && bits[1]) ? E::imaginary_unit() : E(1L);
  });
  EXPECT_TRUE(find_feedforward(c32, three).has_value());
  // on 4 qubits a sign on 1100 alone forces t1 = t2 = t3 = t4 and then contradicts t1 t2 = -t1 t3
  const auto c42 = compile_optimal<E>(4, 2);
  auto sign = rail_state<E>(4, 2, [](const std::vector<int>& bits) {
    return (bits[0] && bits[1]) ? E(-1L) : E(1L);
  });
  EXPECT_FALSE(find_feedforward(c42, sign).has_value());
  // a missing branch is never correctable
  auto uniform = rail_state<E>(3, 1, [](const std::vector<int>&) { return E(1L); });
  ASSERT_TRUE(find_feedforward(c, uniform).has_value());
  const auto partial = project(uniform, [](const Monomial& m) { return m.exponent(ModeLabel::rail(1, 1, 1)) == 0; });
  EXPECT_FALSE(find_feedforward(c, partial).has_value());
  // a bunched output is not a dual-rail state
  auto bunched = FockPolynomial<E>::monomial(Monomial::single(ModeLabel::rail(1, 0, 0), 3));
  EXPECT_FALSE(find_feedforward(c, bunched).has_value());
}

TEST(Feedforward, FamilyMembership) {
  const auto c = compile_optimal<E>(3, 1);
  auto p = canonical_pattern(c);
  EXPECT_TRUE(in_feedforward_family(c, p));
  // move the first S click to port 1 only: ports disagree
  p[0] = 0;
  p[1] = 1;
  EXPECT_FALSE(in_feedforward_family(c, p));
  // move every S click to port 1
  for (unsigned j = 1; j < 3; ++j) {
    p[2 * j] = 0;
    p[2 * j + 1] = 1;
  }
  EXPECT_TRUE(in_feedforward_family(c, p));
  p[1] = 2;
  EXPECT_FALSE(in_feedforward_family(c, p));
}

TEST(HeraldFilter, MonotoneOnRandomMonomials) {
  const auto c = compile_optimal<Complex>(3, 1);
  const auto keep = herald_filter(c);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> mode(0, c.mode_count() - 1);
  std::uniform_int_distribution<int> len(1, 8);
  int kept = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Monomial a = Monomial::single(c.label(mode(rng)));
    const int l = len(rng);
    for (int i = 1; i < l; ++i) a = a * Monomial::single(c.label(mode(rng)));
    const Monomial b = a * Monomial::single(c.label(mode(rng)));
    if (keep(b)) {
      EXPECT_TRUE(keep(a));
      ++kept;
    }
  }
  EXPECT_GT(kept, 10);
}

TEST(Evolution, StepsAgreeWithFullEvolution) {
  const auto c = compile_optimal<E>(2, 1);
  const auto in = input_state(c);
  const auto steps = evolve_steps(c, in);
  ASSERT_EQ(steps.size(), 5u);
  EXPECT_TRUE(factored_equal(steps.back(), evolve_factored(c, in)));
  EXPECT_EQ(evolve(c, in.expand()), steps.back().expand());
}

TEST(Herald, AcceptedAmplitudesMatchPermanents) {
  for (auto [n, k] : {std::pair{2u, 1u}, {3u, 1u}}) {
    const auto c = compile_optimal<Complex>(n, k);
    const auto u = circuit_unitary(c);
    const auto out = evolve_factored(c, input_state(c)).expand({.keep = herald_filter(c)});
    std::vector<unsigned> in_occ(c.mode_count(), 0);
    for (const auto& f : input_state(c).factors) ++in_occ[c.id_of(f.terms().begin()->first.entry(0).label)];
    std::size_t checked = 0, accepted = 0;
    double worst = 0.0;
    for (const auto& h : herald(c, out)) {
      if (!h.accepted) continue;
      ++accepted;
      for (const auto& [mono, coef] : h.conditional_state.terms()) {
        std::vector<unsigned> occ(c.mode_count(), 0);
        for (std::size_t i = 0; i < c.detectors.size(); ++i) occ[c.detectors[i]] = h.pattern[i];
        for (std::size_t i = 0; i < mono.size(); ++i) occ[c.id_of(mono.entry(i).label)] = mono.entry(i).exponent;
        worst = std::max(worst, std::abs(coef - amplitude_by_permanent(u, in_occ, occ)));
        ++checked;
      }
    }
    EXPECT_EQ(BigInt(static_cast<unsigned long>(accepted)), feedforward_factor(n, k));
    EXPECT_EQ(BigInt(static_cast<unsigned long>(checked)), feedforward_factor(n, k) * binomial(n, k));
    EXPECT_LT(worst, 1e-10) << n << "," << k;
  }
}

TEST(Herald, CanonicalPatternIsDickeWithoutCorrection) {
  const auto c = compile_optimal<Complex>(4, 2);
  const auto out = evolve_factored(c, input_state(c)).expand({.keep = herald_filter(c)});
  const auto outcomes = herald(c, out);
  const auto it = std::find_if(outcomes.begin(), outcomes.end(), [](const auto& h) { return h.canonical; });
  ASSERT_NE(it, outcomes.end());
  EXPECT_TRUE(it->accepted);
  EXPECT_EQ(it->conditional_state.size(), 6u);
  EXPECT_NEAR(fidelity_with_dicke(it->conditional_state, 4, 2, QubitEncoding::DualRail).real(), 1.0, 1e-12);
  EXPECT_NEAR(std::sqrt(it->weight.real()), canonical_amplitude(4, 2, 0.5, std::sqrt(0.5)), 1e-15);
}

TEST(Herald, BunchedPatternIsNotAccepted) {
  const auto c = compile_optimal<E>(2, 1);
  // every photon in the first detector
  const auto p = FockPolynomial<E>::monomial(Monomial::single(c.label(c.detectors[0]), 7), E::rational(1, 3));
  const auto outcomes = herald(c, p);
  ASSERT_EQ(outcomes.size(), 1u);
  const auto& h = outcomes[0];
  EXPECT_EQ(h.pattern[0], 7);
  EXPECT_FALSE(h.dual_rail_valid);
  EXPECT_FALSE(h.accepted);
  EXPECT_EQ(h.weight, E(0L));
  EXPECT_EQ(h.total_probability, E::rational(5040, 9));
}

TEST(Simulate, SmallestCaseExact) {
  const auto r = simulate_scheme(2, 1, {.backend = Backend::Exact, .filtered = false});
  EXPECT_EQ(r.backend, "exact");
  EXPECT_EQ(r.accepted_pattern_count, 16u);
  EXPECT_EQ(r.feedforward_factor, "16");
  ASSERT_TRUE(r.exact_match.has_value());
  EXPECT_TRUE(*r.exact_match);
  EXPECT_EQ(r.total_probability.value(), 1.0);
  EXPECT_EQ(r.circuit_fidelity, 1.0);
  EXPECT_EQ(r.dcc_count.value(), 2u);
  EXPECT_TRUE(r.passed());
  // every S-port combination is correctable; only the common-port ones belong to the family
  EXPECT_EQ(r.correctable_pattern_count, 32u);
  EXPECT_NEAR(r.p_success_correctable, 2.0 / 128, 1e-15);
}

TEST(Simulate, UnfilteredFloatIsComplete) {
  const auto r = simulate_scheme(3, 1, {.backend = Backend::Float, .filtered = false, .graph_check = false});
  EXPECT_NEAR(r.total_probability.value(), 1.0, 1e-12);
  EXPECT_LT(r.relative_error, 1e-9);
  EXPECT_EQ(r.accepted_pattern_count, 48u);
  EXPECT_NEAR(r.single_pattern_amplitude, r.single_pattern_amplitude_closed_form, 1e-15);
}

TEST(Simulate, FilteredMatchesUnfiltered) {
  const auto a = simulate_scheme(3, 1, {.backend = Backend::Exact, .filtered = true, .graph_check = false});
  const auto b = simulate_scheme(3, 1, {.backend = Backend::Float, .filtered = false, .graph_check = false});
  EXPECT_EQ(a.accepted_pattern_count, b.accepted_pattern_count);
  EXPECT_NEAR(a.p_success_simulated, b.p_success_simulated, 1e-15);
  EXPECT_FALSE(a.total_probability.has_value());
}

TEST(Simulate, ExactThreeTwo) {
  const auto r = simulate_scheme(3, 2);
  EXPECT_EQ(r.backend, "exact");
  EXPECT_TRUE(r.exact_match.value_or(false));
  EXPECT_EQ(r.accepted_pattern_count, 72u);
  EXPECT_TRUE(r.passed());
}

TEST(Simulate, FourTwoFloat) {
  const auto r = simulate_scheme(4, 2, {.backend = Backend::Float, .graph_check = false});
  EXPECT_TRUE(r.filtered);
  EXPECT_EQ(r.accepted_pattern_count, 192u);
  EXPECT_LT(std::abs(r.p_success_simulated - 384.0 / 113246208.0) / (384.0 / 113246208.0), 1e-9);
  EXPECT_GE(r.circuit_fidelity, 1.0 - 1e-10);
  EXPECT_TRUE(r.passed());
}

TEST(Simulate, CustomSplittingFollowsAmplitudeLaw) {
  const double alpha = 0.5, beta = std::sqrt(0.75);
  const auto r = simulate_scheme(3, 1, {.alpha = alpha, .beta = beta, .graph_check = false});
  EXPECT_EQ(r.backend, "float");
  EXPECT_FALSE(r.optimal_splitting);
  EXPECT_LT(r.relative_error, 1e-9);
  EXPECT_LT(r.p_success_simulated, success_probability_closed_form(3, 1));
}

TEST(Simulate, RejectsInvalidRequests) {
  EXPECT_THROW(simulate_scheme(3, 1, {.alpha = 0.9}), ValidationError);
  EXPECT_THROW(simulate_scheme(3, 1, {.backend = Backend::Exact, .alpha = 0.5, .beta = std::sqrt(0.75)}),
               ValidationError);
  EXPECT_THROW(simulate_scheme(5, 2, {.backend = Backend::Exact}), NotRepresentable);
  EXPECT_THROW(simulate_scheme(3, 3), ValidationError);
  EXPECT_THROW(simulate_scheme(4, 2, {.backend = Backend::Float, .budget = 1000, .graph_check = false}),
               BudgetExceeded);
}
