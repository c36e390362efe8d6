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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "dicke/fock_algebra.hpp"
#include "dicke/lqg_graphs.hpp"

namespace dicke {

/// Converts a graph weight into the requested coefficient type.
template <class S>
S scalar_cast(const ExactScalar& x) {
  if constexpr (std::is_same_v<S, ExactScalar>)
    return x;
  else
    return x.to_complex();
}

template <class S>
struct SculptingTerm {
  ModeLabel mode;  // tagged with the internal state being annihilated
  S amplitude;
};

/// One single-boson annihilation form sum_i c_i a_{mode_i}.
template <class S>
struct SculptingFactor {
  std::string name;
  std::vector<SculptingTerm<S>> terms;

  S weight_norm() const {
    S acc{};
    for (const auto& t : terms) acc += ScalarTraits<S>::abs2(t.amplitude);
    return acc;
  }
};

template <class S>
struct SculptingOperator {
  std::vector<SculptingFactor<S>> factors;
};

/**
 * Bosons before sculpting: a+_{j,+} a+_{j,-} on every system site and a+_{.,+}
 * on every ancilla site.
 */
template <class S>
struct InitialState {
  unsigned n = 0;      // system sites
  unsigned k_anc = 0;  // ancilla sites
  std::vector<Vertex> sites;
  FockPolynomial<S> polynomial;
};

template <class S>
InitialState<S> make_initial_state(const std::vector<Vertex>& sites) {
  InitialState<S> st;
  st.sites = sites;
  st.polynomial = FockPolynomial<S>::constant(ScalarTraits<S>::from_int(1));
  for (const auto& v : sites) {
    if (v.role == VertexRole::System) {
      ++st.n;
      st.polynomial = st.polynomial * FockPolynomial<S>::creation(v.mode(InternalTag::Plus)) *
                      FockPolynomial<S>::creation(v.mode(InternalTag::Minus));
    } else {
      ++st.k_anc;
      st.polynomial = st.polynomial * FockPolynomial<S>::creation(v.mode(InternalTag::Plus));
    }
  }
  return st;
}

/// One factor per dot; every edge adds (circle mode in the edge's state, weight).
template <class S>
SculptingOperator<S> operator_from_bigraph(const SculptingBigraph& g) {
  if (!is_epm_bigraph(g)) throw ValidationError("operator_from_bigraph: bigraph is not EPM");
  SculptingOperator<S> op;
  for (std::size_t d = 0; d < g.dots().size(); ++d) {
    SculptingFactor<S> f{g.dots()[d], {}};
    for (auto e : g.dot_edges(d)) {
      const auto& ed = g.edges()[e];
      f.terms.push_back({g.circles()[ed.circle].mode(color_tag(ed.color)), scalar_cast<S>(ed.weight)});
    }
    op.factors.push_back(std::move(f));
  }
  return op;
}

template <class S>
FockPolynomial<S> apply_factor(const FockPolynomial<S>& state, const SculptingFactor<S>& f) {
  FockPolynomial<S> out;
  for (const auto& t : f.terms) {
    auto part = annihilate_aligned(state, t.mode);
    part *= t.amplitude;
    out += part;
  }
  return out;
}

/// System sites rewritten in the 0/1 basis; ancillas stay in +/-.
template <class S>
FockPolynomial<S> align_system_sites(const FockPolynomial<S>& p) {
  return change_internal_basis(p, InternalBasis::ZOne, [](ModeLabel m) { return m.site() == Site::System; });
}

/// Applies the factors left to right to the initial polynomial.
template <class S>
FockPolynomial<S> apply_sculpting(const SculptingOperator<S>& op, const InitialState<S>& init) {
  auto state = align_system_sites(init.polynomial);
  for (const auto& f : op.factors) {
    state = apply_factor(state, f);
    if (state.is_zero()) break;
  }
  return align_system_sites(state);
}

/// At most one photon per system site and none in any ancilla mode.
inline bool is_no_bunching_monomial(const Monomial& m) {
  std::map<unsigned, std::uint32_t> per_site;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto e = m.entry(i);
    switch (e.label.site()) {
      case Site::System:
        if ((per_site[e.label.a()] += e.exponent) > 1) return false;
        break;
      case Site::AncillaS:
      case Site::AncillaT:
        return false;
      default:
        break;
    }
  }
  return true;
}

template <class S>
FockPolynomial<S> project_no_bunching(const FockPolynomial<S>& p) {
  return project(p, is_no_bunching_monomial);
}

template <class S>
bool no_bunching_check(const SculptingOperator<S>& op, const InitialState<S>& init) {
  const auto fin = apply_sculpting(op, init);
  for (const auto& [m, c] : fin.terms())
    if (!is_no_bunching_monomial(m)) return false;
  return true;
}

/// Annihilator product of one cover: coefficient times a_{target, colour} per vertex.
template <class S>
SculptingFactor<S> cover_monomial(const SculptingDigraph& g, const CycleCover& cover) {
  SculptingFactor<S> f{"cover", {}};
  for (auto e : cover.edge_of) {
    const auto& ed = g.edges()[e];
    f.terms.push_back({g.vertices()[ed.target].mode(color_tag(ed.color)), scalar_cast<S>(ed.weight)});
  }
  return f;
}

/// Sum over covers of the cover's annihilator product applied to the initial state.
template <class S>
FockPolynomial<S> dcc_expansion_state(const SculptingDigraph& g, const std::vector<CycleCover>& covers,
                                      const InitialState<S>& init) {
  FockPolynomial<S> total;
  if (covers.empty()) return total;
  const auto start = align_system_sites(init.polynomial);
  for (const auto& cover : covers) {
    const auto mono = cover_monomial<S>(g, cover);
    auto state = start;
    S coef = ScalarTraits<S>::from_int(1);
    for (const auto& t : mono.terms) {
      state = annihilate_aligned(state, t.mode);
      coef *= t.amplitude;
      if (state.is_zero()) break;
    }
    state *= coef;
    total += state;
  }
  return align_system_sites(total);
}

/// |<D_n^k|state>|^2 / <state|state>.
template <class S>
S fidelity_with_dicke(const FockPolynomial<S>& state, unsigned n, unsigned k,
                      QubitEncoding enc = QubitEncoding::InternalTag) {
  if (state.is_zero()) throw ValidationError("fidelity of the zero state is undefined");
  const auto psi = change_internal_basis(state, InternalBasis::ZOne);
  const auto ref = dicke_reference<S>(n, k, enc);
  const S ov = inner_product(ref, psi);
  return ScalarTraits<S>::abs2(ov) / norm2(psi);
}

/// Multiplies by a phase so that the coefficient of 1..10..0 becomes real positive.
template <class S>
FockPolynomial<S> canonical_phase(const FockPolynomial<S>& state, unsigned n, unsigned k,
                                  QubitEncoding enc = QubitEncoding::InternalTag) {
  std::vector<Monomial::Entry> e;
  for (unsigned m = 0; m < n; ++m) e.push_back({qubit_mode(m + 1, m < k ? 1 : 0, enc), 1});
  const S c = state.coefficient(Monomial::from_entries(e));
  if (ScalarTraits<S>::is_zero(c)) return state;
  if constexpr (ScalarTraits<S>::kExact) {
    const auto a2 = c.abs2();
    if (a2.is_rational()) return state * (c.conj() / ExactScalar::sqrt_rational(a2.to_rational()));
    return state * c.inverse();
  } else {
    return state * (std::conj(c) / std::abs(c));
  }
}

/// Everything the graph-side check establishes for one (n, k).
template <class S>
struct GraphVerification {
  unsigned n = 0, k = 0;
  bool epm_digraph = false;
  bool epm_bigraph = false;
  std::size_t dcc_count = 0;
  std::size_t matching_count = 0;
  BigInt dcc_formula;
  std::set<std::size_t> self_loop_counts;  // distinct per-cover system self-loop counts
  bool no_bunching = false;
  bool two_path_equal = false;
  FockPolynomial<S> final_state;
  S fidelity{};
  double fidelity_value = 0.0;

  bool passed() const {
    const bool exact_one = [&] {
      if constexpr (ScalarTraits<S>::kExact)
        return fidelity == ExactScalar(1L);
      else
        return std::abs(fidelity - Complex(1.0)) < 1e-12;
    }();
    return epm_digraph && epm_bigraph && no_bunching && two_path_equal && exact_one &&
           BigInt(static_cast<unsigned long>(dcc_count)) == dcc_formula && matching_count == dcc_count;
  }
};

/**
 * Full graph-side pipeline: build D_n^k, check EPM, enumerate cycle covers and
 * matchings, apply the sculpting operator, and compare with both the
 * cover-by-cover expansion and the Dicke reference.
 */
template <class S>
GraphVerification<S> verify_dicke_graph(unsigned n, unsigned k, std::optional<DickeWeights> weights = std::nullopt,
                                        bool allow_degenerate = false) {
  GraphVerification<S> r;
  r.n = n;
  r.k = k;
  const auto g = build_dicke_digraph(n, k, weights, allow_degenerate);
  r.epm_digraph = is_epm_digraph(g);
  const auto covers = enumerate_dccs(g);
  r.dcc_count = covers.size();
  r.dcc_formula = dcc_count_formula(n, k);
  for (const auto& c : covers) {
    std::size_t loops = 0;
    for (std::size_t u = 0; u < c.edge_of.size(); ++u)
      if (g.vertices()[u].role == VertexRole::System && g.edges()[c.edge_of[u]].target == u) ++loops;
    r.self_loop_counts.insert(loops);
  }
  const auto b = digraph_to_bigraph(g);
  r.epm_bigraph = is_epm_bigraph(b);
  r.matching_count = enumerate_perfect_matchings(b).size();
  const auto op = operator_from_bigraph<S>(b);
  const auto init = make_initial_state<S>(b.circles());
  const auto fin = apply_sculpting(op, init);
  r.no_bunching = true;
  for (const auto& [m, c] : fin.terms())
    if (!is_no_bunching_monomial(m)) r.no_bunching = false;
  r.final_state = project_no_bunching(fin);
  const auto via_covers = project_no_bunching(dcc_expansion_state(g, covers, init));
  r.two_path_equal = approx_equal(r.final_state, via_covers);
  if (!r.final_state.is_zero()) {
    r.fidelity = fidelity_with_dicke(r.final_state, n, k);
    r.fidelity_value = ScalarTraits<S>::real(r.fidelity);
  }
  return r;
}

}  // namespace dicke
