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

#include "dicke/fock_algebra.hpp"
#include "oracles.hpp"

using namespace dicke;
using EPoly = FockPolynomial<ExactScalar>;
using FPoly = FockPolynomial<Complex>;

namespace {

ModeLabel g(unsigned i) { return ModeLabel::generic(i); }

ModeLabel sys(unsigned j, InternalTag t) { return ModeLabel::system(j, t); }

/// Random exact polynomial over a few generic modes, small integer coefficients.
EPoly random_poly(std::mt19937_64& rng, unsigned modes = 4, unsigned max_terms = 5, unsigned max_deg = 3) {
  std::uniform_int_distribution<unsigned> nterms(1, max_terms), mode(1, modes), deg(0, max_deg);
  std::uniform_int_distribution<int> coeff(-4, 4);
  EPoly p;
  const unsigned t = nterms(rng);
  for (unsigned i = 0; i < t; ++i) {
    std::vector<Monomial::Entry> e;
    const unsigned d = deg(rng);
    for (unsigned j = 0; j < d; ++j) e.push_back({g(mode(rng)), 1});
    p.insert_raw(Monomial::from_entries(e), ExactScalar(long(coeff(rng))));
  }
  return p;
}

/// Random polynomial over tagged system sites, each site in a random fixed basis.
EPoly random_tagged_poly(std::mt19937_64& rng, const std::vector<InternalBasis>& basis) {
  std::uniform_int_distribution<unsigned> nterms(1, 4), site(0, unsigned(basis.size()) - 1), deg(1, 3), bit(0, 1);
  std::uniform_int_distribution<int> coeff(-3, 3);
  EPoly p;
  for (unsigned i = 0, t = nterms(rng); i < t; ++i) {
    std::vector<Monomial::Entry> e;
    for (unsigned j = 0, d = deg(rng); j < d; ++j) {
      const unsigned s = site(rng);
      const bool b = bit(rng);
      const InternalTag tag = basis[s] == InternalBasis::ZOne ? (b ? InternalTag::One : InternalTag::Zero)
                                                             : (b ? InternalTag::Minus : InternalTag::Plus);
      e.push_back({sys(s + 1, tag), 1});
    }
    p.add_term(Monomial::from_entries(e), ExactScalar(long(coeff(rng))));
  }
  return p;
}

}  // namespace

TEST(FockAlgebra, ProductOfSingleModes) {
  const auto p = EPoly::creation(g(1)) * EPoly::creation(g(2));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.coefficient(Monomial::from_entries({{g(1), 1}, {g(2), 1}})), ExactScalar(1L));
}

TEST(FockAlgebra, DifferenceOfSquares) {
  const auto a = EPoly::creation(g(1)), b = EPoly::creation(g(2));
  const auto p = (a + b) * (a - b);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.coefficient(Monomial::single(g(1), 2)), ExactScalar(1L));
  EXPECT_EQ(p.coefficient(Monomial::single(g(2), 2)), ExactScalar(-1L));
}

TEST(FockAlgebra, ProductMatchesBruteForceDistribution) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<oracle::Factor> factors;
    FPoly acc = FPoly::constant(1.0);
    for (int f = 0; f < 4; ++f) {
      oracle::Factor of;
      FPoly pf;
      for (int t = 0; t < 3; ++t) {
        const unsigned m = 1 + unsigned(rng() % 5);
        const Complex c(u(rng), u(rng));
        of.push_back({{g(m).packed()}, c});
        pf.add_term(Monomial::single(g(m)), c);
      }
      factors.push_back(of);
      acc = acc * pf;
    }
    const auto expect = oracle::brute_force_expand(factors);
    ASSERT_EQ(acc.size(), expect.size());
    for (const auto& [keys, c] : expect) {
      std::vector<Monomial::Entry> e;
      for (auto k : keys) e.push_back({ModeLabel::from_packed(k), 1});
      EXPECT_LT(std::abs(acc.coefficient(Monomial::from_entries(e)) - c), 1e-12);
    }
  }
}

TEST(FockAlgebra, AnnihilationRules) {
  const auto p = EPoly::creation(g(1)) * EPoly::creation(g(2));
  EXPECT_EQ(annihilate(p, g(1)), EPoly::creation(g(2)));
  const auto sq = EPoly::monomial(Monomial::single(g(1), 2));
  EXPECT_EQ(annihilate(sq, g(1)), EPoly::creation(g(1), ExactScalar(2L)));
  EXPECT_TRUE(annihilate(p, g(3)).is_zero());
}

TEST(FockAlgebra, PairIdentitiesUnderBasisAlignment) {
  // a_{j,0} a+_{j,+} a+_{j,-} |vac> = a+_{j,0} |vac>, a_{j,1}(...) = -a+_{j,1} |vac>
  const auto pair = EPoly::creation(sys(1, InternalTag::Plus)) * EPoly::creation(sys(1, InternalTag::Minus));
  const auto r0 = change_internal_basis(annihilate_aligned(pair, sys(1, InternalTag::Zero)), InternalBasis::ZOne);
  const auto r1 = change_internal_basis(annihilate_aligned(pair, sys(1, InternalTag::One)), InternalBasis::ZOne);
  EXPECT_EQ(r0, EPoly::creation(sys(1, InternalTag::Zero)));
  EXPECT_EQ(r1, EPoly::creation(sys(1, InternalTag::One), ExactScalar(-1L)));
  // same identities with the pair rewritten in the 0/1 basis first
  const auto z = change_internal_basis(pair, InternalBasis::ZOne);
  EXPECT_EQ(annihilate_aligned(z, sys(1, InternalTag::Zero)), EPoly::creation(sys(1, InternalTag::Zero)));
  EXPECT_EQ(annihilate_aligned(z, sys(1, InternalTag::One)), EPoly::creation(sys(1, InternalTag::One), ExactScalar(-1L)));
}

TEST(FockAlgebra, BasisChangeOfSingleAndPair) {
  const auto h = ExactScalar::sqrt_rational(ratio(1, 2));
  const auto plus = change_internal_basis(EPoly::creation(sys(2, InternalTag::Plus)), InternalBasis::ZOne);
  EXPECT_EQ(plus, EPoly::linear({{sys(2, InternalTag::Zero), h}, {sys(2, InternalTag::One), h}}));
  const auto pair = EPoly::creation(sys(1, InternalTag::Plus)) * EPoly::creation(sys(1, InternalTag::Minus));
  EPoly expect;
  expect.add_term(Monomial::single(sys(1, InternalTag::Zero), 2), ExactScalar(ratio(1, 2)));
  expect.add_term(Monomial::single(sys(1, InternalTag::One), 2), ExactScalar(ratio(-1, 2)));
  EXPECT_EQ(change_internal_basis(pair, InternalBasis::ZOne), expect);
}

TEST(FockAlgebra, MixedBasisRejected) {
  const auto bad = EPoly::creation(sys(1, InternalTag::Plus)) * EPoly::creation(sys(1, InternalTag::Zero));
  EXPECT_THROW(change_internal_basis(bad, InternalBasis::ZOne), ValidationError);
  const auto p = EPoly::creation(sys(1, InternalTag::Plus));
  const auto q = EPoly::creation(sys(1, InternalTag::Zero));
  EXPECT_THROW(inner_product(p, q), ValidationError);
}

TEST(FockAlgebra, InnerProductFactorials) {
  const auto a = EPoly::creation(g(1));
  EXPECT_EQ(inner_product(a, a), ExactScalar(1L));
  const auto a2 = EPoly::monomial(Monomial::single(g(1), 2));
  EXPECT_EQ(inner_product(a2, a2), ExactScalar(2L));
  const auto i = ExactScalar::imaginary_unit();
  EXPECT_EQ(inner_product(a * i, a), -i);
}

TEST(FockAlgebra, DickeReference) {
  const auto d10 = dicke_reference<ExactScalar>(1, 0, QubitEncoding::InternalTag);
  EXPECT_EQ(d10, EPoly::creation(sys(1, InternalTag::Zero)));
  const auto d42 = dicke_reference<ExactScalar>(4, 2, QubitEncoding::InternalTag);
  EXPECT_EQ(d42.size(), 6u);
  for (const auto& [m, c] : d42.terms()) EXPECT_EQ(c * c, ExactScalar(ratio(1, 6)));
  EXPECT_EQ(inner_product(d42, d42), ExactScalar(1L));
  const auto d33 = dicke_reference<ExactScalar>(3, 3, QubitEncoding::DualRail);
  ASSERT_EQ(d33.size(), 1u);
  EXPECT_EQ(d33.coefficient(Monomial::from_entries(
                {{ModeLabel::rail(1, 1, 1), 1}, {ModeLabel::rail(2, 1, 1), 1}, {ModeLabel::rail(3, 1, 1), 1}})),
            ExactScalar(1L));
  EXPECT_THROW(dicke_reference<ExactScalar>(2, 3, QubitEncoding::InternalTag), ValidationError);
}

TEST(FockAlgebraProperties, CanonicalizeIsIdempotent) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 1000; ++t) {
    auto p = random_poly(rng);
    p.canonicalize();
    ASSERT_TRUE(p.is_canonical());
    auto q = p;
    q.canonicalize();
    ASSERT_EQ(p, q);
  }
}

TEST(FockAlgebraProperties, AnnihilationIsADerivation) {
  std::mt19937_64 rng(202);
  for (int t = 0; t < 1000; ++t) {
    auto p = random_poly(rng).canonicalize();
    auto q = random_poly(rng).canonicalize();
    const ModeLabel m = g(1 + unsigned(rng() % 4));
    ASSERT_EQ(annihilate(p * q, m), annihilate(p, m) * q + p * annihilate(q, m));
  }
}

TEST(FockAlgebraProperties, BasisChangePreservesInnerProducts) {
  std::mt19937_64 rng(303);
  for (int t = 0; t < 1000; ++t) {
    std::vector<InternalBasis> basis;
    for (int s = 0; s < 3; ++s) basis.push_back(rng() % 2 ? InternalBasis::ZOne : InternalBasis::PlusMinus);
    const auto p = random_tagged_poly(rng, basis);
    const auto q = random_tagged_poly(rng, basis);
    const auto target = rng() % 2 ? InternalBasis::ZOne : InternalBasis::PlusMinus;
    ASSERT_EQ(inner_product(p, q), inner_product(change_internal_basis(p, target), change_internal_basis(q, target)));
  }
}

TEST(FockAlgebraProperties, BasisChangeRoundTrip) {
  std::mt19937_64 rng(404);
  for (int t = 0; t < 1000; ++t) {
    const std::vector<InternalBasis> basis(3, InternalBasis::ZOne);
    const auto p = random_tagged_poly(rng, basis);
    const auto back =
        change_internal_basis(change_internal_basis(p, InternalBasis::PlusMinus), InternalBasis::ZOne);
    ASSERT_EQ(back, p);
  }
}

TEST(FactoredState, BlockwiseEqualityAgreesWithExpansion) {
  std::mt19937_64 rng(505);
  for (int t = 0; t < 200; ++t) {
    FactoredState<ExactScalar> a, b;
    for (int f = 0; f < 3; ++f) a.factors.push_back(random_poly(rng, 6, 3, 2).canonicalize());
    a.scalar = ExactScalar(ratio(long(rng() % 5) + 1, 3));
    // same product, reshuffled and rescaled factors
    b.scalar = a.scalar * ExactScalar(6L);
    b.factors = {a.factors[2] * ExactScalar(ratio(1, 2)), a.factors[0], a.factors[1] * ExactScalar(ratio(1, 3))};
    if (a.expand().is_zero()) continue;
    EXPECT_TRUE(factored_equal(a, b));
    b.scalar = b.scalar * ExactScalar(2L);
    EXPECT_FALSE(factored_equal(a, b));
  }
}
