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

#include <algorithm>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/exact_scalar.hpp"
#include "dicke/fock_algebra.hpp"

namespace dicke {

/// Edge colours encode the internal state the annihilator acts on.
enum class EdgeColor : std::uint8_t { SolidBlack, DashedBlack, Red, Blue };

inline InternalTag color_tag(EdgeColor c) {
  switch (c) {
    case EdgeColor::SolidBlack: return InternalTag::Plus;
    case EdgeColor::DashedBlack: return InternalTag::Minus;
    case EdgeColor::Red: return InternalTag::Zero;
    default: return InternalTag::One;
  }
}

inline const char* color_name(EdgeColor c) {
  switch (c) {
    case EdgeColor::SolidBlack: return "solid_black";
    case EdgeColor::DashedBlack: return "dashed_black";
    case EdgeColor::Red: return "red";
    default: return "blue";
  }
}

inline EdgeColor color_from_name(const std::string& s) {
  if (s == "solid_black") return EdgeColor::SolidBlack;
  if (s == "dashed_black") return EdgeColor::DashedBlack;
  if (s == "red") return EdgeColor::Red;
  if (s == "blue") return EdgeColor::Blue;
  throw ValidationError("unknown edge colour '" + s + "'");
}

/// System vertices hold a |+>|-> boson pair; ancillas hold one |+> boson.
enum class VertexRole : std::uint8_t { System, AncillaS, AncillaT };

inline const char* role_name(VertexRole r) {
  switch (r) {
    case VertexRole::System: return "system";
    case VertexRole::AncillaS: return "ancilla_s";
    default: return "ancilla_t";
  }
}

inline VertexRole role_from_name(const std::string& s) {
  if (s == "system") return VertexRole::System;
  if (s == "ancilla_s") return VertexRole::AncillaS;
  if (s == "ancilla_t") return VertexRole::AncillaT;
  throw ValidationError("unknown vertex role '" + s + "'");
}

struct Vertex {
  VertexRole role = VertexRole::System;
  unsigned index = 1;  // 1-based j, S_j or T_l index

  unsigned bosons() const { return role == VertexRole::System ? 2u : 1u; }

  ModeLabel mode(InternalTag t) const {
    switch (role) {
      case VertexRole::System: return ModeLabel::system(index, t);
      case VertexRole::AncillaS: return ModeLabel::ancilla_s(index, t);
      default: return ModeLabel::ancilla_t(index, t);
    }
  }

  std::string name() const {
    switch (role) {
      case VertexRole::System: return std::to_string(index);
      case VertexRole::AncillaS: return "S" + std::to_string(index);
      default: return "T" + std::to_string(index);
    }
  }

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct DiEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  EdgeColor color = EdgeColor::SolidBlack;
  ExactScalar weight{1L};
};

/**
 * @brief Sculpting digraph: vertex u's out-edges form operator factor A^(u),
 * and an edge u -> v with colour c annihilates mode v in internal state c.
 */
class SculptingDigraph {
 public:
  std::size_t add_vertex(Vertex v) {
    vertices_.push_back(v);
    return vertices_.size() - 1;
  }
  void add_edge(std::size_t source, std::size_t target, EdgeColor color, ExactScalar weight) {
    if (source >= vertices_.size() || target >= vertices_.size())
      throw ValidationError("edge endpoint out of range");
    if (weight.is_zero()) return;
    edges_.push_back({source, target, color, std::move(weight)});
  }
  void remove_edge(std::size_t e) { edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(e)); }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<DiEdge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }

  std::vector<std::size_t> out_edges(std::size_t u) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].source == u) out.push_back(e);
    return out;
  }
  std::vector<std::size_t> in_edges(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].target == v) out.push_back(e);
    return out;
  }

  std::optional<std::size_t> find_vertex(VertexRole role, unsigned index) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      if (vertices_[i].role == role && vertices_[i].index == index) return i;
    return std::nullopt;
  }

  /// Sum of |w|^2 over the out-edges of u (exact).
  ExactScalar out_weight_norm(std::size_t u) const {
    ExactScalar acc;
    for (auto e : out_edges(u)) acc += edges_[e].weight.abs2();
    return acc;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<DiEdge> edges_;
};

struct BiEdge {
  std::size_t dot = 0;
  std::size_t circle = 0;
  EdgeColor color = EdgeColor::SolidBlack;
  ExactScalar weight{1L};
};

/**
 * @brief Sculpting bigraph: circles are spatial modes, dots are operator
 * factors. Dots keep the name of the digraph vertex they came from.
 */
class SculptingBigraph {
 public:
  std::size_t add_circle(Vertex v) {
    circles_.push_back(v);
    return circles_.size() - 1;
  }
  std::size_t add_dot(std::string name) {
    dots_.push_back(std::move(name));
    return dots_.size() - 1;
  }
  void add_edge(std::size_t dot, std::size_t circle, EdgeColor color, ExactScalar weight) {
    if (dot >= dots_.size() || circle >= circles_.size()) throw ValidationError("bigraph edge endpoint out of range");
    if (weight.is_zero()) return;
    edges_.push_back({dot, circle, color, std::move(weight)});
  }

  const std::vector<Vertex>& circles() const { return circles_; }
  const std::vector<std::string>& dots() const { return dots_; }
  const std::vector<BiEdge>& edges() const { return edges_; }
  bool balanced() const { return circles_.size() == dots_.size(); }

  std::vector<std::size_t> dot_edges(std::size_t d) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].dot == d) out.push_back(e);
    return out;
  }
  std::vector<std::size_t> circle_edges(std::size_t c) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].circle == c) out.push_back(e);
    return out;
  }

 private:
  std::vector<Vertex> circles_;
  std::vector<std::string> dots_;
  std::vector<BiEdge> edges_;
};

/// Disjoint cycle cover, stored as the chosen out-edge of every vertex.
struct CycleCover {
  std::vector<std::size_t> edge_of;

  /// Cycles as vertex sequences, each starting at its smallest vertex.
  std::vector<std::vector<std::size_t>> cycles(const SculptingDigraph& g) const {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> seen(edge_of.size(), false);
    for (std::size_t s = 0; s < edge_of.size(); ++s) {
      if (seen[s]) continue;
      std::vector<std::size_t> cyc;
      for (std::size_t u = s; !seen[u]; u = g.edges()[edge_of[u]].target) {
        seen[u] = true;
        cyc.push_back(u);
      }
      out.push_back(std::move(cyc));
    }
    return out;
  }

  std::size_t self_loops(const SculptingDigraph& g) const {
    std::size_t c = 0;
    for (std::size_t u = 0; u < edge_of.size(); ++u)
      if (g.edges()[edge_of[u]].target == u) ++c;
    return c;
  }

  /// Sorted (source, target, colour) triples; independent of edge numbering.
  std::vector<std::tuple<std::size_t, std::size_t, int>> signature(const SculptingDigraph& g) const {
    std::vector<std::tuple<std::size_t, std::size_t, int>> s;
    for (auto e : edge_of) s.emplace_back(g.edges()[e].source, g.edges()[e].target, int(g.edges()[e].color));
    std::sort(s.begin(), s.end());
    return s;
  }
};

/// Perfect matching, stored as the chosen edge of every dot.
struct Matching {
  std::vector<std::size_t> edge_of_dot;
};

/// Edge weights of the Dicke digraph. alpha, beta are the S_j -> T_l and S_j -> j
/// amplitudes (k alpha^2 + beta^2 = 1).
struct DickeWeights {
  ExactScalar alpha;
  ExactScalar beta;

  /// Equal amplitude on every outgoing edge of S_j.
  static DickeWeights uniform(unsigned k) {
    const auto w = ExactScalar::sqrt_rational(ratio(1, long(k) + 1));
    return {w, w};
  }
  /// Splitting that maximizes beta^(n-k) alpha^k.
  static DickeWeights optimal(unsigned n, unsigned k) {
    return {ExactScalar::sqrt_rational(ratio(1, long(n))), ExactScalar::sqrt_rational(ratio(long(n) - long(k), long(n)))};
  }
};

inline void validate_nk(unsigned n, unsigned k, bool allow_degenerate) {
  if (n < 1 || n > 64) throw ValidationError("n must be in [1, 64]");
  if (k > n) throw ValidationError("k must not exceed n");
  if (!allow_degenerate && (k == 0 || k == n))
    throw ValidationError("need 1 <= k <= n-1 (k = 0 or k = n only with the degenerate option)");
}

/**
 * Builds D_n^k. Vertices: system 1..n, then S_1..S_n, then T_1..T_k.
 * Edges: j -> j (blue, -1/sqrt2), j -> S_j (solid, 1/sqrt2), S_j -> j (red, beta),
 * S_j -> T_l (solid, alpha), T_l -> S_j (solid, 1/sqrt n).
 */
inline SculptingDigraph build_dicke_digraph(unsigned n, unsigned k, std::optional<DickeWeights> weights = std::nullopt,
                                            bool allow_degenerate = false) {
  validate_nk(n, k, allow_degenerate);
  const DickeWeights w = weights ? *weights : DickeWeights::uniform(k);
  if (!(ExactScalar(long(k)) * w.alpha.abs2() + w.beta.abs2() == ExactScalar(1L)))
    throw ValidationError("splitting amplitudes must satisfy k alpha^2 + beta^2 = 1");
  SculptingDigraph g;
  for (unsigned j = 1; j <= n; ++j) g.add_vertex({VertexRole::System, j});
  for (unsigned j = 1; j <= n; ++j) g.add_vertex({VertexRole::AncillaS, j});
  for (unsigned l = 1; l <= k; ++l) g.add_vertex({VertexRole::AncillaT, l});
  const auto h = ExactScalar::sqrt_rational(ratio(1, 2));
  const auto t_amp = ExactScalar::sqrt_rational(ratio(1, long(n)));
  for (unsigned j = 0; j < n; ++j) {
    g.add_edge(j, j, EdgeColor::Blue, -h);
    g.add_edge(j, n + j, EdgeColor::SolidBlack, h);
  }
  for (unsigned j = 0; j < n; ++j) {
    g.add_edge(n + j, j, EdgeColor::Red, w.beta);
    for (unsigned l = 0; l < k; ++l) g.add_edge(n + j, 2 * n + l, EdgeColor::SolidBlack, w.alpha);
  }
  for (unsigned l = 0; l < k; ++l)
    for (unsigned j = 0; j < n; ++j) g.add_edge(2 * n + l, n + j, EdgeColor::SolidBlack, t_amp);
  return g;
}

namespace detail {

/// Double-annihilation amplitude on a |+>|-> pair for annihilators of states a, b,
/// scaled by 2 to stay integral: 2(<a|+><b|-> + <a|-><b|+>).
inline int pair_overlap_x2(EdgeColor a, EdgeColor b) {
  // <c|+>, <c|-> scaled by sqrt2
  auto amp = [](EdgeColor c) -> std::pair<int, int> {
    switch (c) {
      case EdgeColor::SolidBlack: return {2, 0};
      case EdgeColor::DashedBlack: return {0, 2};
      case EdgeColor::Red: return {1, 1};
      default: return {1, -1};
    }
  };
  const auto [ap, am] = amp(a);
  const auto [bp, bm] = amp(b);
  return ap * bm + am * bp;
}

}  // namespace detail

/**
 * EPM rule for bigraphs: balanced; every circle and dot has an edge; a
 * single-boson circle never takes an annihilator orthogonal to its |+> boson;
 * on a two-boson circle any two edges from different dots have vanishing
 * joint annihilation amplitude, so no dot pair can empty the circle.
 */
inline bool is_epm_bigraph(const SculptingBigraph& g) {
  if (!g.balanced() || g.circles().empty()) return false;
  for (std::size_t d = 0; d < g.dots().size(); ++d)
    if (g.dot_edges(d).empty()) return false;
  for (std::size_t c = 0; c < g.circles().size(); ++c) {
    const auto inc = g.circle_edges(c);
    if (inc.empty()) return false;
    if (g.circles()[c].bosons() == 1) {
      for (auto e : inc)
        if (g.edges()[e].color == EdgeColor::DashedBlack) return false;
      continue;
    }
    for (std::size_t x = 0; x < inc.size(); ++x)
      for (std::size_t y = x + 1; y < inc.size(); ++y) {
        const auto& ex = g.edges()[inc[x]];
        const auto& ey = g.edges()[inc[y]];
        if (ex.dot != ey.dot && detail::pair_overlap_x2(ex.color, ey.color) != 0) return false;
      }
  }
  return true;
}

namespace detail {

inline SculptingBigraph as_bigraph(const SculptingDigraph& g) {
  SculptingBigraph b;
  for (const auto& v : g.vertices()) b.add_circle(v);
  for (const auto& v : g.vertices()) b.add_dot("A(" + v.name() + ")");
  for (const auto& e : g.edges()) b.add_edge(e.source, e.target, e.color, e.weight);
  return b;
}

}  // namespace detail

/// A digraph is EPM iff its circle/dot split is an EPM bigraph.
inline bool is_epm_digraph(const SculptingDigraph& g) { return is_epm_bigraph(detail::as_bigraph(g)); }

/// Splits every vertex into a circle (its mode) and a dot (its factor),
/// keeping indices, colours and weights.
inline SculptingBigraph digraph_to_bigraph(const SculptingDigraph& g) {
  if (!is_epm_digraph(g)) throw ValidationError("digraph is not EPM; no local bigraph form");
  return detail::as_bigraph(g);
}

/// Exhaustive cycle-cover enumeration by backtracking over successor choices.
inline std::vector<CycleCover> enumerate_dccs(const SculptingDigraph& g) {
  const std::size_t nv = g.vertex_count();
  std::vector<std::vector<std::size_t>> out_e(nv);
  for (std::size_t e = 0; e < g.edges().size(); ++e) out_e[g.edges()[e].source].push_back(e);
  std::vector<CycleCover> covers;
  if (nv == 0) return covers;
  std::vector<std::size_t> choice(nv);
  std::vector<bool> taken(nv, false);
  auto rec = [&](auto&& self, std::size_t u) -> void {
    if (u == nv) {
      covers.push_back({choice});
      return;
    }
    for (auto e : out_e[u]) {
      const std::size_t v = g.edges()[e].target;
      if (taken[v]) continue;
      taken[v] = true;
      choice[u] = e;
      self(self, u + 1);
      taken[v] = false;
    }
  };
  rec(rec, 0);
  return covers;
}

/// Exhaustive perfect-matching enumeration by backtracking over dots.
inline std::vector<Matching> enumerate_perfect_matchings(const SculptingBigraph& g) {
  if (!g.balanced()) throw ValidationError("perfect matchings need a balanced bigraph");
  const std::size_t nd = g.dots().size();
  std::vector<std::vector<std::size_t>> dot_e(nd);
  for (std::size_t e = 0; e < g.edges().size(); ++e) dot_e[g.edges()[e].dot].push_back(e);
  std::vector<Matching> out;
  if (nd == 0) return out;
  std::vector<std::size_t> choice(nd);
  std::vector<bool> taken(g.circles().size(), false);
  auto rec = [&](auto&& self, std::size_t d) -> void {
    if (d == nd) {
      out.push_back({choice});
      return;
    }
    for (auto e : dot_e[d]) {
      const std::size_t c = g.edges()[e].circle;
      if (taken[c]) continue;
      taken[c] = true;
      choice[d] = e;
      self(self, d + 1);
      taken[c] = false;
    }
  };
  rec(rec, 0);
  return out;
}

/// C(n,k) (k!)^2.
inline BigInt dcc_count_formula(unsigned n, unsigned k) {
  if (k > n) throw ValidationError("k must not exceed n");
  BigInt f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return binomial(n, k) * f * f;
}

/**
 * Relabels D_n^k-shaped digraphs: system/S pair j goes to pair pair_perm[j-1]+1
 * and T_l to T_{t_perm[l-1]+1}. Vertices are re-sorted into canonical order;
 * `vertex_map` receives old -> new vertex ids.
 */
inline SculptingDigraph relabel_pairs(const SculptingDigraph& g, const std::vector<unsigned>& pair_perm,
                                      const std::vector<unsigned>& t_perm,
                                      std::vector<std::size_t>* vertex_map = nullptr) {
  std::vector<Vertex> moved;
  for (const auto& v : g.vertices()) {
    Vertex w = v;
    const auto& perm = v.role == VertexRole::AncillaT ? t_perm : pair_perm;
    if (v.index < 1 || v.index > perm.size()) throw ValidationError("relabel permutation too short");
    w.index = perm[v.index - 1] + 1;
    moved.push_back(w);
  }
  std::vector<std::size_t> order(moved.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(int(moved[a].role), moved[a].index) < std::pair(int(moved[b].role), moved[b].index);
  });
  std::vector<std::size_t> map(moved.size());
  SculptingDigraph out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    map[order[i]] = i;
    out.add_vertex(moved[order[i]]);
  }
  for (const auto& e : g.edges()) out.add_edge(map[e.source], map[e.target], e.color, e.weight);
  if (vertex_map) *vertex_map = map;
  return out;
}

/// Equality of vertex lists and edge multisets (edge order ignored).
inline bool same_digraph(const SculptingDigraph& a, const SculptingDigraph& b) {
  if (a.vertices() != b.vertices() || a.edges().size() != b.edges().size()) return false;
  auto key = [](const SculptingDigraph& g) {
    std::vector<std::tuple<std::size_t, std::size_t, int, std::string>> v;
    for (const auto& e : g.edges()) v.emplace_back(e.source, e.target, int(e.color), e.weight.to_string());
    std::sort(v.begin(), v.end());
    return v;
  };
  return key(a) == key(b);
}

}  // namespace dicke
