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
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/fock_algebra.hpp"
#include "dicke/lqg_graphs.hpp"
#include "dicke/matrix.hpp"

namespace dicke {

enum class ElementKind : std::uint8_t {
  Beamsplitter,
  SymmetricMultiport,
  AsymmetricMultiport,
  Permutation,
  PhaseShift,
};

inline const char* element_kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::Beamsplitter: return "beamsplitter";
    case ElementKind::SymmetricMultiport: return "symmetric_multiport";
    case ElementKind::AsymmetricMultiport: return "asymmetric_multiport";
    case ElementKind::Permutation: return "permutation";
    default: return "phase_shift";
  }
}

/**
 * A passive element on a list of circuit modes. Column c of `matrix` is the
 * image of the photon entering modes[c]: a+_{modes[c]} -> sum_r M(r,c) a+_{modes[r]}.
 */
template <class S>
struct CircuitElement {
  ElementKind kind = ElementKind::Beamsplitter;
  int step = 0;
  std::vector<std::size_t> modes;
  Matrix<S> matrix;
};

struct CircuitMode {
  std::size_t id = 0;
  ModeLabel label;
  std::string origin;
};

enum class DetectorGroupKind : std::uint8_t { SBranch, TBranch, SystemPair };

/// Detectors that together herald one ancilla (or one system pair).
struct DetectorGroup {
  DetectorGroupKind kind = DetectorGroupKind::SBranch;
  unsigned index = 0;
  std::vector<std::size_t> modes;
};

template <class S>
struct OpticalCircuit {
  unsigned n = 0, k = 0;
  S alpha{}, beta{};
  std::vector<CircuitMode> modes;
  std::vector<CircuitElement<S>> layers;
  std::vector<std::size_t> detectors;  // concatenation of the detector groups
  std::vector<DetectorGroup> detector_groups;
  std::vector<std::size_t> outputs;                          // (m,0,0), (m,1,1) for m = 1..n
  std::vector<std::pair<std::size_t, std::size_t>> qubits;  // (|0_L> mode, |1_L> mode)

  std::size_t mode_count() const { return modes.size(); }

  std::size_t id_of(ModeLabel m) const {
    auto it = index_.find(m.packed());
    if (it == index_.end()) throw ValidationError("unknown circuit mode " + m.to_string());
    return it->second;
  }
  bool has_mode(ModeLabel m) const { return index_.count(m.packed()) != 0; }
  ModeLabel label(std::size_t id) const { return modes.at(id).label; }

  void add_mode(ModeLabel m, std::string origin) {
    index_[m.packed()] = modes.size();
    modes.push_back({modes.size(), m, std::move(origin)});
  }

 private:
  std::unordered_map<std::uint32_t, std::size_t> index_;
};

/// (1/sqrt2) [[1, 1], [1, -1]].
template <class S>
Matrix<S> beamsplitter_matrix() {
  const S h = ScalarTraits<S>::sqrt_rational(ratio(1, 2));
  Matrix<S> m(2, 2);
  m(0, 0) = h;
  m(0, 1) = h;
  m(1, 0) = h;
  m(1, 1) = -h;
  return m;
}

/// d-port discrete Fourier transform, (U_d)_{pq} = omega^{pq} / sqrt(d), 0-based.
template <class S>
Matrix<S> dft_matrix(unsigned d) {
  const S norm = ScalarTraits<S>::sqrt_rational(ratio(1, long(d)));
  Matrix<S> m(d, d);
  for (unsigned p = 0; p < d; ++p)
    for (unsigned q = 0; q < d; ++q) m(p, q) = ScalarTraits<S>::root_of_unity(long(p * q % d), long(d)) * norm;
  return m;
}

/**
 * Real unitary whose first column is v (|v| = 1): the Householder reflection
 * exchanging e_1 and v.
 */
template <class S>
Matrix<S> splitter_matrix(const std::vector<S>& v) {
  const std::size_t d = v.size();
  Matrix<S> h = Matrix<S>::identity(d);
  std::vector<S> w = v;
  w[0] -= ScalarTraits<S>::from_int(1);
  S ww{};
  for (const auto& x : w) ww += x * ScalarTraits<S>::conj(x);
  if (ScalarTraits<S>::is_zero(ww)) return h;
  const S scale = ScalarTraits<S>::from_int(2) / ww;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) h(r, c) -= scale * w[r] * ScalarTraits<S>::conj(w[c]);
  return h;
}

/**
 * Step-4 interconnect as a label bijection: S_j branch s <-> T_s branch j for
 * s <= k, and S_j branch k+1 <-> rail (j,0,1). Every other mode is fixed.
 */
inline std::map<ModeLabel, ModeLabel> wire_permutation(unsigned n, unsigned k) {
  validate_nk(n, k, false);
  std::map<ModeLabel, ModeLabel> p;
  auto swap = [&](ModeLabel a, ModeLabel b) {
    p[a] = b;
    p[b] = a;
  };
  for (unsigned j = 1; j <= n; ++j) {
    for (unsigned s = 1; s <= k; ++s) swap(ModeLabel::s_branch(j, s), ModeLabel::t_branch(s, j));
    swap(ModeLabel::s_branch(j, k + 1), ModeLabel::rail(j, 0, 1));
  }
  return p;
}

/**
 * Lays out the five-step network for D_n^k.
 * Modes: rails (m, s, s') for m = 1..n, then S_j branches 1..k+1, then T_l branches 1..n.
 * Step 1 input photons sit in S_j branch 1, T_l branch 1, and rails (m,0,0), (m,1,1).
 */
template <class S>
OpticalCircuit<S> compile(unsigned n, unsigned k, const S& alpha, const S& beta) {
  validate_nk(n, k, false);
  if (n > 32) throw ValidationError("n too large for the circuit layout");
  const S lhs = ScalarTraits<S>::from_int(long(k)) * ScalarTraits<S>::abs2(alpha) + ScalarTraits<S>::abs2(beta);
  if (!ScalarTraits<S>::equal(lhs, ScalarTraits<S>::from_int(1), 1e-12))
    throw ValidationError("splitting amplitudes must satisfy k alpha^2 + beta^2 = 1");

  OpticalCircuit<S> c;
  c.n = n;
  c.k = k;
  c.alpha = alpha;
  c.beta = beta;
  for (unsigned m = 1; m <= n; ++m)
    for (unsigned s = 0; s < 2; ++s)
      for (unsigned s2 = 0; s2 < 2; ++s2)
        c.add_mode(ModeLabel::rail(m, s, s2),
                   "rail(" + std::to_string(m) + "," + std::to_string(s) + "," + std::to_string(s2) + ")");
  for (unsigned j = 1; j <= n; ++j)
    for (unsigned s = 1; s <= k + 1; ++s)
      c.add_mode(ModeLabel::s_branch(j, s), "S" + std::to_string(j) + "." + std::to_string(s));
  for (unsigned l = 1; l <= k; ++l)
    for (unsigned t = 1; t <= n; ++t)
      c.add_mode(ModeLabel::t_branch(l, t), "T" + std::to_string(l) + "." + std::to_string(t));

  auto s_group = [&](unsigned j) {
    std::vector<std::size_t> g;
    for (unsigned s = 1; s <= k + 1; ++s) g.push_back(c.id_of(ModeLabel::s_branch(j, s)));
    return g;
  };
  auto t_group = [&](unsigned l) {
    std::vector<std::size_t> g;
    for (unsigned t = 1; t <= n; ++t) g.push_back(c.id_of(ModeLabel::t_branch(l, t)));
    return g;
  };
  auto rail = [&](unsigned m, unsigned s, unsigned s2) { return c.id_of(ModeLabel::rail(m, s, s2)); };
  auto add = [&](ElementKind kind, int step, std::vector<std::size_t> modes, Matrix<S> mat) {
    c.layers.push_back({kind, step, std::move(modes), std::move(mat)});
  };

  // Step 2: split ancillas, combine the two photons of every system site
  std::vector<S> v(k + 1, alpha);
  v[k] = beta;
  const auto split = splitter_matrix(v);
  const auto dft_n = dft_matrix<S>(n);
  const auto dft_k1 = dft_matrix<S>(k + 1);
  const auto bs = beamsplitter_matrix<S>();
  for (unsigned j = 1; j <= n; ++j) add(ElementKind::AsymmetricMultiport, 2, s_group(j), split);
  for (unsigned l = 1; l <= k; ++l) add(ElementKind::SymmetricMultiport, 2, t_group(l), dft_n);
  for (unsigned m = 1; m <= n; ++m) add(ElementKind::Beamsplitter, 2, {rail(m, 0, 0), rail(m, 1, 1)}, bs);

  // Step 3: split each rail into its two branches
  for (unsigned m = 1; m <= n; ++m) {
    add(ElementKind::Beamsplitter, 3, {rail(m, 0, 0), rail(m, 0, 1)}, bs);
    add(ElementKind::Beamsplitter, 3, {rail(m, 1, 0), rail(m, 1, 1)}, bs);
  }

  // Step 4: interconnect
  {
    const auto perm = wire_permutation(n, k);
    std::vector<std::size_t> ids;
    for (const auto& [from, to] : perm) ids.push_back(c.id_of(from));
    std::sort(ids.begin(), ids.end());
    Matrix<S> pm(ids.size(), ids.size());
    for (std::size_t col = 0; col < ids.size(); ++col) {
      const std::size_t target = c.id_of(perm.at(c.label(ids[col])));
      const auto row = std::lower_bound(ids.begin(), ids.end(), target) - ids.begin();
      pm(static_cast<std::size_t>(row), col) = ScalarTraits<S>::from_int(1);
    }
    add(ElementKind::Permutation, 4, ids, pm);
  }

  // Step 5: Fourier ports on the ancilla groups, final beamsplitter on the inner rails
  for (unsigned l = 1; l <= k; ++l) add(ElementKind::SymmetricMultiport, 5, t_group(l), dft_n);
  for (unsigned j = 1; j <= n; ++j) add(ElementKind::SymmetricMultiport, 5, s_group(j), dft_k1);
  for (unsigned m = 1; m <= n; ++m) add(ElementKind::Beamsplitter, 5, {rail(m, 0, 1), rail(m, 1, 0)}, bs);

  for (unsigned j = 1; j <= n; ++j) c.detector_groups.push_back({DetectorGroupKind::SBranch, j, s_group(j)});
  for (unsigned l = 1; l <= k; ++l) c.detector_groups.push_back({DetectorGroupKind::TBranch, l, t_group(l)});
  for (unsigned m = 1; m <= n; ++m)
    c.detector_groups.push_back({DetectorGroupKind::SystemPair, m, {rail(m, 0, 1), rail(m, 1, 0)}});
  for (const auto& g : c.detector_groups) c.detectors.insert(c.detectors.end(), g.modes.begin(), g.modes.end());
  for (unsigned m = 1; m <= n; ++m) {
    c.qubits.emplace_back(rail(m, 0, 0), rail(m, 1, 1));
    c.outputs.push_back(rail(m, 0, 0));
    c.outputs.push_back(rail(m, 1, 1));
  }
  return c;
}

/// Compiles with alpha = 1/sqrt(n), beta = sqrt((n-k)/n).
template <class S>
OpticalCircuit<S> compile_optimal(unsigned n, unsigned k) {
  validate_nk(n, k, false);
  return compile<S>(n, k, ScalarTraits<S>::sqrt_rational(ratio(1, long(n))),
                    ScalarTraits<S>::sqrt_rational(ratio(long(n - k), long(n))));
}

/// Float circuit from real splitting amplitudes.
inline OpticalCircuit<Complex> compile(unsigned n, unsigned k, double alpha, double beta) {
  return compile<Complex>(n, k, Complex(alpha, 0.0), Complex(beta, 0.0));
}

/// Ordered product of all element matrices embedded in the full mode space.
template <class S>
Matrix<S> circuit_unitary(const OpticalCircuit<S>& c) {
  const std::size_t M = c.mode_count();
  Matrix<S> u = Matrix<S>::identity(M);
  for (const auto& e : c.layers) {
    if (e.matrix.rows() != e.modes.size() || e.matrix.cols() != e.modes.size())
      throw ValidationError("element matrix does not match its mode list");
    // only the element's rows change: U' = E U
    Matrix<S> next = u;
    for (std::size_t r = 0; r < e.modes.size(); ++r)
      for (std::size_t col = 0; col < M; ++col) {
        S acc{};
        for (std::size_t x = 0; x < e.modes.size(); ++x)
          if (!ScalarTraits<S>::is_zero(e.matrix(r, x))) acc += e.matrix(r, x) * u(e.modes[x], col);
        next(e.modes[r], col) = acc;
      }
    u = std::move(next);
  }
  return u;
}

/// Substitution a+_{modes[c]} -> sum_r M(r,c) a+_{modes[r]} for one element.
template <class S>
LinearSubstitution<S> element_substitution(const OpticalCircuit<S>& c, const CircuitElement<S>& e) {
  LinearSubstitution<S> sub;
  for (std::size_t col = 0; col < e.modes.size(); ++col) {
    typename LinearSubstitution<S>::Form f;
    for (std::size_t r = 0; r < e.modes.size(); ++r)
      if (!ScalarTraits<S>::is_zero(e.matrix(r, col))) f.emplace_back(c.label(e.modes[r]), e.matrix(r, col));
    sub.set(c.label(e.modes[col]), std::move(f));
  }
  return sub;
}

/// Substitution by an arbitrary mode-space matrix (columns = input modes).
template <class S>
LinearSubstitution<S> matrix_substitution(const OpticalCircuit<S>& c, const Matrix<S>& u) {
  LinearSubstitution<S> sub;
  for (std::size_t col = 0; col < c.mode_count(); ++col) {
    typename LinearSubstitution<S>::Form f;
    for (std::size_t r = 0; r < c.mode_count(); ++r)
      if (!ScalarTraits<S>::is_zero(u(r, col))) f.emplace_back(c.label(r), u(r, col));
    sub.set(c.label(col), std::move(f));
  }
  return sub;
}

namespace circuit_detail {

template <class S>
void check_labels(const OpticalCircuit<S>& c, const FockPolynomial<S>& p) {
  for (const auto m : p.modes())
    if (!c.has_mode(m)) throw ValidationError("state uses mode " + m.to_string() + " outside the circuit");
}

}  // namespace circuit_detail

template <class S>
FockPolynomial<S> apply_element(const OpticalCircuit<S>& c, const FockPolynomial<S>& state,
                                const CircuitElement<S>& e) {
  circuit_detail::check_labels(c, state);
  return substitute(state, element_substitution(c, e));
}

template <class S>
FactoredState<S> apply_element(const OpticalCircuit<S>& c, const FactoredState<S>& state,
                               const CircuitElement<S>& e) {
  for (const auto& f : state.factors) circuit_detail::check_labels(c, f);
  return state.substituted(element_substitution(c, e));
}

/// Step-1 product state, one single-photon factor per occupied input mode.
template <class S>
FactoredState<S> input_state(const OpticalCircuit<S>& c) {
  FactoredState<S> st;
  for (unsigned j = 1; j <= c.n; ++j) st.factors.push_back(FockPolynomial<S>::creation(ModeLabel::s_branch(j, 1)));
  for (unsigned l = 1; l <= c.k; ++l) st.factors.push_back(FockPolynomial<S>::creation(ModeLabel::t_branch(l, 1)));
  for (unsigned m = 1; m <= c.n; ++m) {
    st.factors.push_back(FockPolynomial<S>::creation(ModeLabel::rail(m, 0, 0)));
    st.factors.push_back(FockPolynomial<S>::creation(ModeLabel::rail(m, 1, 1)));
  }
  return st;
}

}  // namespace dicke
