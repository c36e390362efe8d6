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
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/exact_scalar.hpp"

namespace dicke {

/// Kind of physical location a mode belongs to. Sculpting-level sites come
/// first, circuit paths after them; the numeric order fixes label order.
enum class Site : std::uint8_t {
  Generic = 0,
  System = 1,
  AncillaS = 2,
  AncillaT = 3,
  Rail = 4,
  SBranch = 5,
  TBranch = 6,
};

enum class InternalTag : std::uint8_t { None = 0, Plus = 1, Minus = 2, Zero = 3, One = 4 };

enum class InternalBasis : std::uint8_t { ZOne, PlusMinus };

inline InternalBasis basis_of(InternalTag t) {
  switch (t) {
    case InternalTag::Plus:
    case InternalTag::Minus:
      return InternalBasis::PlusMinus;
    case InternalTag::Zero:
    case InternalTag::One:
      return InternalBasis::ZOne;
    default:
      throw std::invalid_argument("untagged mode has no internal basis");
  }
}

inline const char* tag_symbol(InternalTag t) {
  switch (t) {
    case InternalTag::Plus: return "+";
    case InternalTag::Minus: return "-";
    case InternalTag::Zero: return "0";
    case InternalTag::One: return "1";
    default: return "";
  }
}

/**
 * @brief Mode identifier packed into 32 bits.
 *
 * Layout (high to low): site:3 | a:8 | b:8 | c:8 | tag:3. Indices are 1-based
 * as in the physical description (system j, S_j, T_l, rail (m, s, s'), ...),
 * so the packed integer order is the canonical label order.
 */
class ModeLabel {
 public:
  constexpr ModeLabel() = default;
  constexpr ModeLabel(Site site, unsigned a, unsigned b = 0, unsigned c = 0,
                      InternalTag tag = InternalTag::None)
      : packed_((static_cast<std::uint32_t>(site) << 27) | ((a & 0xFFu) << 19) |
                ((b & 0xFFu) << 11) | ((c & 0xFFu) << 3) | static_cast<std::uint32_t>(tag)) {}

  static ModeLabel system(unsigned j, InternalTag t) { return tagged(Site::System, j, t); }
  static ModeLabel ancilla_s(unsigned j, InternalTag t = InternalTag::Plus) {
    return tagged(Site::AncillaS, j, t);
  }
  static ModeLabel ancilla_t(unsigned l, InternalTag t = InternalTag::Plus) {
    return tagged(Site::AncillaT, l, t);
  }
  /// Dual-rail path (m, sigma, sigma'); the Step-1 rails are (m,0,0) and (m,1,1).
  static constexpr ModeLabel rail(unsigned m, unsigned sigma, unsigned sigma2) {
    return ModeLabel(Site::Rail, m, sigma, sigma2);
  }
  static constexpr ModeLabel s_branch(unsigned j, unsigned s) { return ModeLabel(Site::SBranch, j, s); }
  static constexpr ModeLabel t_branch(unsigned l, unsigned t) { return ModeLabel(Site::TBranch, l, t); }
  static constexpr ModeLabel generic(unsigned id) {
    return ModeLabel(Site::Generic, (id >> 16) & 0xFFu, (id >> 8) & 0xFFu, id & 0xFFu);
  }
  static constexpr ModeLabel from_packed(std::uint32_t p) {
    ModeLabel m;
    m.packed_ = p;
    return m;
  }

  constexpr std::uint32_t packed() const { return packed_; }
  constexpr Site site() const { return static_cast<Site>(packed_ >> 27); }
  constexpr unsigned a() const { return (packed_ >> 19) & 0xFFu; }
  constexpr unsigned b() const { return (packed_ >> 11) & 0xFFu; }
  constexpr unsigned c() const { return (packed_ >> 3) & 0xFFu; }
  constexpr InternalTag tag() const { return static_cast<InternalTag>(packed_ & 0x7u); }
  constexpr bool has_tag() const { return tag() != InternalTag::None; }

  /// Same spatial mode with a different internal state.
  constexpr ModeLabel with_tag(InternalTag t) const {
    return from_packed((packed_ & ~0x7u) | static_cast<std::uint32_t>(t));
  }
  constexpr ModeLabel spatial() const { return with_tag(InternalTag::None); }

  friend constexpr auto operator<=>(const ModeLabel&, const ModeLabel&) = default;

  std::string to_string() const {
    const std::string ia = std::to_string(a());
    switch (site()) {
      case Site::System: return "q" + ia + tag_symbol(tag());
      case Site::AncillaS: return "S" + ia + tag_symbol(tag());
      case Site::AncillaT: return "T" + ia + tag_symbol(tag());
      case Site::Rail: return "r" + ia + "_" + std::to_string(b()) + std::to_string(c());
      case Site::SBranch: return "S" + ia + "_" + std::to_string(b());
      case Site::TBranch: return "T" + ia + "_" + std::to_string(b());
      default: return "g" + std::to_string((a() << 16) | (b() << 8) | c()) + tag_symbol(tag());
    }
  }

 private:
  static ModeLabel tagged(Site s, unsigned idx, InternalTag t) {
    if (t == InternalTag::None) throw std::invalid_argument("sculpting-level mode needs an internal tag");
    return ModeLabel(s, idx, 0, 0, t);
  }

  std::uint32_t packed_ = 0;
};

struct ModeLabelHash {
  std::size_t operator()(const ModeLabel& m) const noexcept { return std::hash<std::uint32_t>{}(m.packed()); }
};

/**
 * @brief Product of creation operators in canonical (label-sorted) form.
 *
 * Each entry packs (label << 32 | exponent); exponents are strictly positive.
 */
class Monomial {
 public:
  struct Entry {
    ModeLabel label;
    std::uint32_t exponent;
  };

  Monomial() = default;

  static Monomial single(ModeLabel m, std::uint32_t exponent = 1) {
    Monomial out;
    if (exponent > 0) out.e_.push_back(pack(m, exponent));
    return out;
  }

  /// Builds from arbitrary (label, exponent) pairs; repeated labels accumulate.
  static Monomial from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& x, const Entry& y) { return x.label < y.label; });
    Monomial out;
    for (const auto& en : entries) {
      if (en.exponent == 0) continue;
      if (!out.e_.empty() && label_of(out.e_.back()) == en.label)
        out.e_.back() += en.exponent;
      else
        out.e_.push_back(pack(en.label, en.exponent));
    }
    return out;
  }

  std::size_t size() const { return e_.size(); }
  bool empty() const { return e_.empty(); }
  Entry entry(std::size_t i) const { return {label_of(e_[i]), exponent_of(e_[i])}; }
  const std::vector<std::uint64_t>& raw() const { return e_; }

  std::uint32_t degree() const {
    std::uint32_t d = 0;
    for (auto v : e_) d += exponent_of(v);
    return d;
  }

  std::uint32_t exponent(ModeLabel m) const {
    auto it = find(m);
    return it == e_.end() ? 0 : exponent_of(*it);
  }

  /// Product of exponent factorials: the squared norm of the unit-coefficient Fock state.
  std::uint64_t factorial_weight() const {
    std::uint64_t w = 1;
    for (auto v : e_)
      for (std::uint32_t i = 2; i <= exponent_of(v); ++i) w *= i;
    return w;
  }

  /// Removes one quantum of m; returns the previous exponent (0 if absent, monomial unchanged).
  std::uint32_t lower(ModeLabel m) {
    auto it = find(m);
    if (it == e_.end()) return 0;
    const std::uint32_t r = exponent_of(*it);
    if (r == 1)
      e_.erase(it);
    else
      *it -= 1;
    return r;
  }

  friend Monomial operator*(const Monomial& x, const Monomial& y) {
    Monomial out;
    out.e_.reserve(x.e_.size() + y.e_.size());
    std::size_t i = 0, j = 0;
    while (i < x.e_.size() && j < y.e_.size()) {
      const auto lx = x.e_[i] >> 32, ly = y.e_[j] >> 32;
      if (lx < ly)
        out.e_.push_back(x.e_[i++]);
      else if (ly < lx)
        out.e_.push_back(y.e_[j++]);
      else
        out.e_.push_back(x.e_[i++] + exponent_of(y.e_[j++]));
    }
    while (i < x.e_.size()) out.e_.push_back(x.e_[i++]);
    while (j < y.e_.size()) out.e_.push_back(y.e_[j++]);
    return out;
  }

  friend bool operator==(const Monomial& x, const Monomial& y) { return x.e_ == y.e_; }
  friend bool operator<(const Monomial& x, const Monomial& y) { return x.e_ < y.e_; }

  std::size_t hash() const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull ^ e_.size();
    for (auto v : e_) {
      v ^= v >> 33;
      v *= 0xff51afd7ed558ccdull;
      v ^= v >> 33;
      h = (h ^ v) * 0x100000001b3ull + (h << 6);
    }
    return static_cast<std::size_t>(h);
  }

  std::string to_string() const {
    if (e_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (i) s += " ";
      s += "a+[" + label_of(e_[i]).to_string() + "]";
      if (exponent_of(e_[i]) > 1) s += "^" + std::to_string(exponent_of(e_[i]));
    }
    return s;
  }

 private:
  static std::uint64_t pack(ModeLabel m, std::uint32_t e) { return (std::uint64_t{m.packed()} << 32) | e; }
  static ModeLabel label_of(std::uint64_t v) { return ModeLabel::from_packed(static_cast<std::uint32_t>(v >> 32)); }
  static std::uint32_t exponent_of(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xFFFFFFFFu); }

  std::vector<std::uint64_t>::iterator find(ModeLabel m) {
    auto it = std::lower_bound(e_.begin(), e_.end(), pack(m, 0));
    return (it != e_.end() && label_of(*it) == m) ? it : e_.end();
  }
  std::vector<std::uint64_t>::const_iterator find(ModeLabel m) const {
    auto it = std::lower_bound(e_.begin(), e_.end(), pack(m, 0));
    return (it != e_.end() && label_of(*it) == m) ? it : e_.end();
  }

  std::vector<std::uint64_t> e_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept { return m.hash(); }
};

/// Keep-predicate used to prune terms during expansion.
using MonomialFilter = std::function<bool(const Monomial&)>;

/**
 * @brief Creation polynomial acting on the vacuum, with coefficients in S.
 *
 * Zero coefficients are dropped on insertion; insert_raw() bypasses that and
 * canonicalize() restores the invariant.
 */
template <class S>
class FockPolynomial {
 public:
  using Traits = ScalarTraits<S>;
  using Map = std::unordered_map<Monomial, S, MonomialHash>;

  FockPolynomial() = default;

  static FockPolynomial constant(const S& c) {
    FockPolynomial p;
    p.add_term(Monomial{}, c);
    return p;
  }
  static FockPolynomial creation(ModeLabel m, const S& c = Traits::from_int(1)) {
    FockPolynomial p;
    p.add_term(Monomial::single(m), c);
    return p;
  }
  static FockPolynomial monomial(const Monomial& m, const S& c = Traits::from_int(1)) {
    FockPolynomial p;
    p.add_term(m, c);
    return p;
  }
  /// Linear form sum_i c_i a+_{m_i}.
  static FockPolynomial linear(const std::vector<std::pair<ModeLabel, S>>& form) {
    FockPolynomial p;
    for (const auto& [m, c] : form) p.add_term(Monomial::single(m), c);
    return p;
  }

  void add_term(const Monomial& m, const S& c) {
    if (Traits::is_zero(c)) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }
  void add_term(Monomial&& m, const S& c) {
    if (Traits::is_zero(c)) return;
    auto [it, fresh] = terms_.try_emplace(std::move(m), c);
    if (!fresh) {
      it->second += c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Accumulates without pruning zeros; call canonicalize() afterwards.
  void insert_raw(const Monomial& m, const S& c) {
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) it->second += c;
  }

  FockPolynomial& canonicalize() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = Traits::is_zero(it->second) ? terms_.erase(it) : std::next(it);
    return *this;
  }

  bool is_canonical() const {
    return std::none_of(terms_.begin(), terms_.end(), [](const auto& t) { return Traits::is_zero(t.second); });
  }

  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  const Map& terms() const { return terms_; }
  void reserve(std::size_t n) { terms_.reserve(n); }

  S coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? S{} : it->second;
  }

  /// Terms in canonical monomial order (for deterministic output).
  std::vector<std::pair<Monomial, S>> sorted_terms() const {
    std::vector<std::pair<Monomial, S>> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
  }

  std::uint32_t max_degree() const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  std::uint32_t min_degree() const {
    if (terms_.empty()) return 0;
    std::uint32_t d = UINT32_MAX;
    for (const auto& [m, c] : terms_) d = std::min(d, m.degree());
    return d;
  }
  bool is_homogeneous() const { return max_degree() == min_degree(); }

  /// Sorted list of every label that occurs.
  std::vector<ModeLabel> modes() const {
    std::vector<ModeLabel> out;
    for (const auto& [m, c] : terms_)
      for (std::size_t i = 0; i < m.size(); ++i) out.push_back(m.entry(i).label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  FockPolynomial& operator+=(const FockPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  FockPolynomial& operator-=(const FockPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  FockPolynomial& operator*=(const S& s) {
    if (Traits::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return canonicalize();
  }
  FockPolynomial operator-() const {
    FockPolynomial out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }
  friend FockPolynomial operator+(FockPolynomial a, const FockPolynomial& b) { return a += b; }
  friend FockPolynomial operator-(FockPolynomial a, const FockPolynomial& b) { return a -= b; }
  friend FockPolynomial operator*(FockPolynomial a, const S& s) { return a *= s; }
  friend FockPolynomial operator*(const S& s, FockPolynomial a) { return a *= s; }
  friend FockPolynomial operator*(const FockPolynomial& a, const FockPolynomial& b) { return mul(a, b); }

  /**
   * Distributive product. Terms rejected by `keep` are dropped as they are
   * formed; a BudgetExceeded is thrown once the result exceeds `budget` terms.
   */
  friend FockPolynomial mul(const FockPolynomial& p, const FockPolynomial& q, const MonomialFilter& keep = {},
                            std::size_t budget = SIZE_MAX) {
    FockPolynomial out;
    out.terms_.reserve(std::min<std::size_t>(p.size() * q.size(), 1u << 20));
    for (const auto& [mp, cp] : p.terms_) {
      for (const auto& [mq, cq] : q.terms_) {
        Monomial m = mp * mq;
        if (keep && !keep(m)) continue;
        out.add_term(std::move(m), cp * cq);
      }
      if (out.size() > budget) throw BudgetExceeded(budget, out.size());
    }
    return out;
  }

  friend bool operator==(const FockPolynomial& a, const FockPolynomial& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [m, c] : a.terms_) {
      auto it = b.terms_.find(m);
      if (it == b.terms_.end() || !(it->second == c)) return false;
    }
    return true;
  }

  std::string to_string() const {
    std::string s;
    for (const auto& [m, c] : sorted_terms()) {
      if (!s.empty()) s += "\n";
      const Complex z = Traits::to_complex(c);
      s += "(" + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") + std::to_string(z.imag()) + "i) " +
           m.to_string();
    }
    return s.empty() ? "0" : s;
  }

 private:
  Map terms_;
};

/// Tolerance-aware equality: exact for ExactScalar, relative for floats.
template <class S>
bool approx_equal(const FockPolynomial<S>& a, const FockPolynomial<S>& b, double tol = 1e-12) {
  if constexpr (ScalarTraits<S>::kExact) {
    return a == b;
  } else {
    double scale = 0.0;
    for (const auto& [m, c] : a.terms()) scale = std::max(scale, std::abs(c));
    for (const auto& [m, c] : b.terms()) scale = std::max(scale, std::abs(c));
    const double lim = tol * std::max(scale, 1e-300);
    for (const auto& [m, c] : a.terms())
      if (std::abs(c - b.coefficient(m)) > lim) return false;
    for (const auto& [m, c] : b.terms())
      if (std::abs(c - a.coefficient(m)) > lim) return false;
    return true;
  }
}

/// Formal bosonic derivative: a_m (a+_m)^r -> r (a+_m)^(r-1), per term.
template <class S>
FockPolynomial<S> annihilate(const FockPolynomial<S>& p, ModeLabel mode) {
  FockPolynomial<S> out;
  for (const auto& [m, c] : p.terms()) {
    Monomial lowered = m;
    const std::uint32_t r = lowered.lower(mode);
    if (r == 0) continue;
    out.add_term(std::move(lowered), c * ScalarTraits<S>::from_int(static_cast<long>(r)));
  }
  return out;
}

/// Linear substitution a+_m -> sum_i c_i a+_{m_i} for the listed labels.
template <class S>
class LinearSubstitution {
 public:
  using Form = std::vector<std::pair<ModeLabel, S>>;

  void set(ModeLabel m, Form f) { map_[m] = std::move(f); }
  const Form* find(ModeLabel m) const {
    auto it = map_.find(m);
    return it == map_.end() ? nullptr : &it->second;
  }
  bool empty() const { return map_.empty(); }
  const std::unordered_map<ModeLabel, Form, ModeLabelHash>& entries() const { return map_; }

 private:
  std::unordered_map<ModeLabel, Form, ModeLabelHash> map_;
};

template <class S>
FockPolynomial<S> substitute(const FockPolynomial<S>& p, const LinearSubstitution<S>& sub) {
  if (sub.empty()) return p;
  using Poly = FockPolynomial<S>;
  FockPolynomial<S> out;
  // powers of each substituted form are reused across terms
  std::unordered_map<std::uint64_t, Poly> power_cache;
  auto power = [&](ModeLabel m, const typename LinearSubstitution<S>::Form& f, std::uint32_t e) -> const Poly& {
    const std::uint64_t key = (std::uint64_t{m.packed()} << 32) | e;
    auto it = power_cache.find(key);
    if (it != power_cache.end()) return it->second;
    Poly base = Poly::linear(f);
    Poly acc = Poly::constant(ScalarTraits<S>::from_int(1));
    for (std::uint32_t i = 0; i < e; ++i) acc = mul(acc, base);
    return power_cache.emplace(key, std::move(acc)).first->second;
  };
  for (const auto& [m, c] : p.terms()) {
    std::vector<Monomial::Entry> kept;
    Poly acc;
    bool started = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto en = m.entry(i);
      const auto* f = sub.find(en.label);
      if (!f) {
        kept.push_back(en);
        continue;
      }
      const Poly& pw = power(en.label, *f, en.exponent);
      acc = started ? mul(acc, pw) : pw;
      started = true;
    }
    if (!started) {
      out.add_term(m, c);
      continue;
    }
    const Monomial rest = Monomial::from_entries(std::move(kept));
    for (const auto& [mm, cc] : acc.terms()) out.add_term(mm * rest, cc * c);
  }
  return out;
}

namespace detail {

/// Internal basis used by each tagged spatial site of p; throws on a site mixing bases.
template <class S>
std::map<ModeLabel, InternalBasis> site_bases(const FockPolynomial<S>& p) {
  std::map<ModeLabel, InternalBasis> out;
  for (const ModeLabel m : p.modes()) {
    if (!m.has_tag()) continue;
    const InternalBasis b = basis_of(m.tag());
    auto [it, fresh] = out.emplace(m.spatial(), b);
    if (!fresh && it->second != b)
      throw ValidationError("mode " + m.spatial().to_string() + " mixes the 0/1 and +/- internal bases");
  }
  return out;
}

template <class S>
typename LinearSubstitution<S>::Form basis_form(ModeLabel m) {
  using T = ScalarTraits<S>;
  const S h = T::sqrt_rational(ratio(1, 2));
  switch (m.tag()) {
    case InternalTag::Plus:
      return {{m.with_tag(InternalTag::Zero), h}, {m.with_tag(InternalTag::One), h}};
    case InternalTag::Minus:
      return {{m.with_tag(InternalTag::Zero), h}, {m.with_tag(InternalTag::One), -h}};
    case InternalTag::Zero:
      return {{m.with_tag(InternalTag::Plus), h}, {m.with_tag(InternalTag::Minus), h}};
    case InternalTag::One:
      return {{m.with_tag(InternalTag::Plus), h}, {m.with_tag(InternalTag::Minus), -h}};
    default:
      throw std::invalid_argument("basis_form on untagged mode");
  }
}

}  // namespace detail

/**
 * Rewrites every tagged site accepted by `which` into the target internal
 * basis using |+-> = (|0> +- |1>)/sqrt2. Each site must use a single basis.
 */
template <class S>
FockPolynomial<S> change_internal_basis(const FockPolynomial<S>& p, InternalBasis target,
                                        const std::function<bool(ModeLabel)>& which = {}) {
  const auto bases = detail::site_bases(p);
  LinearSubstitution<S> sub;
  for (const ModeLabel m : p.modes()) {
    if (!m.has_tag() || basis_of(m.tag()) == target) continue;
    if (which && !which(m.spatial())) continue;
    sub.set(m, detail::basis_form<S>(m));
  }
  return substitute(p, sub);
}

/**
 * Applies the annihilator of `mode` (a tagged or untagged label), first
 * re-expressing it in the basis the polynomial uses at that site.
 */
template <class S>
FockPolynomial<S> annihilate_aligned(const FockPolynomial<S>& p, ModeLabel mode) {
  if (!mode.has_tag()) return annihilate(p, mode);
  const auto bases = detail::site_bases(p);
  auto it = bases.find(mode.spatial());
  if (it == bases.end()) return {};
  if (it->second == basis_of(mode.tag())) return annihilate(p, mode);
  // a_m = sum_i conj(c_i) a_{m_i}; the basis-change coefficients are real
  FockPolynomial<S> out;
  for (const auto& [m2, c] : detail::basis_form<S>(mode)) {
    auto part = annihilate(p, m2);
    part *= ScalarTraits<S>::conj(c);
    out += part;
  }
  return out;
}

/// <vac| P^dagger Q |vac> with <(a+)^r|(a+)^r> = r!.
template <class S>
S inner_product(const FockPolynomial<S>& p, const FockPolynomial<S>& q) {
  const auto bp = detail::site_bases(p);
  const auto bq = detail::site_bases(q);
  for (const auto& [site, b] : bp) {
    auto it = bq.find(site);
    if (it != bq.end() && it->second != b)
      throw ValidationError("inner product across different internal bases at " + site.to_string());
  }
  const auto& small = p.size() <= q.size() ? p : q;
  const auto& large = p.size() <= q.size() ? q : p;
  S acc{};
  for (const auto& [m, c] : small.terms()) {
    auto it = large.terms().find(m);
    if (it == large.terms().end()) continue;
    const S w = ScalarTraits<S>::from_int(static_cast<long>(m.factorial_weight()));
    if (&small == &p)
      acc += ScalarTraits<S>::conj(c) * it->second * w;
    else
      acc += ScalarTraits<S>::conj(it->second) * c * w;
  }
  return acc;
}

template <class S>
S norm2(const FockPolynomial<S>& p) {
  S acc{};
  for (const auto& [m, c] : p.terms())
    acc += ScalarTraits<S>::abs2(c) * ScalarTraits<S>::from_int(static_cast<long>(m.factorial_weight()));
  return acc;
}

/// Keeps only the terms accepted by `keep`.
template <class S>
FockPolynomial<S> project(const FockPolynomial<S>& p, const MonomialFilter& keep) {
  FockPolynomial<S> out;
  for (const auto& [m, c] : p.terms())
    if (keep(m)) out.add_term(m, c);
  return out;
}

enum class QubitEncoding : std::uint8_t { InternalTag, DualRail };

/// Mode carrying logical value `bit` of qubit m (1-based).
inline ModeLabel qubit_mode(unsigned m, int bit, QubitEncoding enc) {
  if (enc == QubitEncoding::InternalTag) return ModeLabel::system(m, bit ? InternalTag::One : InternalTag::Zero);
  return bit ? ModeLabel::rail(m, 1, 1) : ModeLabel::rail(m, 0, 0);
}

inline BigInt binomial(unsigned n, unsigned k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

/// Calls f(bits) for every n-bit vector of Hamming weight k, in lexicographic
/// order with qubit 1 as the most significant position (11..100..0 first).
template <class F>
void for_each_weight_k(unsigned n, unsigned k, F&& f) {
  std::vector<int> bits(n, 0);
  std::fill(bits.begin(), bits.begin() + k, 1);
  do {
    f(bits);
  } while (std::prev_permutation(bits.begin(), bits.end()));
}

/// Normalized Dicke state: C(n,k)^{-1/2} times the sum of weight-k strings.
template <class S>
FockPolynomial<S> dicke_reference(unsigned n, unsigned k, QubitEncoding enc) {
  if (n < 1 || k > n || n > 255) throw ValidationError("dicke_reference: need n >= 1 and 0 <= k <= n");
  const S amp = ScalarTraits<S>::sqrt_rational(Rational(1) / Rational(binomial(n, k)));
  FockPolynomial<S> out;
  for_each_weight_k(n, k, [&](const std::vector<int>& bits) {
    std::vector<Monomial::Entry> e;
    for (unsigned m = 0; m < n; ++m) e.push_back({qubit_mode(m + 1, bits[m], enc), 1});
    out.add_term(Monomial::from_entries(std::move(e)), amp);
  });
  return out;
}

/// Budget and pruning options for expanding a factored state.
struct ExpandOptions {
  std::size_t budget = 100000000;
  MonomialFilter keep;
};

/**
 * @brief Unexpanded product state: scalar * prod(factors).
 *
 * Linear-optical elements act as algebra homomorphisms on creation
 * polynomials, so they can be applied factor by factor and the product is
 * only multiplied out once at the end.
 */
template <class S>
struct FactoredState {
  S scalar = ScalarTraits<S>::from_int(1);
  std::vector<FockPolynomial<S>> factors;

  std::uint32_t photon_number() const {
    std::uint32_t n = 0;
    for (const auto& f : factors) n += f.max_degree();
    return n;
  }

  FactoredState substituted(const LinearSubstitution<S>& sub) const {
    FactoredState out;
    out.scalar = scalar;
    out.factors.reserve(factors.size());
    for (const auto& f : factors) out.factors.push_back(substitute(f, sub));
    return out;
  }

  FockPolynomial<S> expand(const ExpandOptions& opt = {}) const {
    auto acc = FockPolynomial<S>::constant(scalar);
    for (const auto& f : factors) acc = mul(acc, f, opt.keep, opt.budget);
    return acc;
  }
};

namespace detail {

template <class S>
bool scalar_near(const S& a, const S& b, double tol) {
  if constexpr (ScalarTraits<S>::kExact) {
    return a == b;
  } else {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
  }
}

}  // namespace detail

/**
 * Checks scalar*prod(A) == scalar*prod(B) without a full expansion. Factors
 * are grouped into blocks of overlapping modes; each block is expanded on its
 * own and compared up to a ratio, and the ratios must reconcile the scalars.
 */
template <class S>
bool factored_equal(const FactoredState<S>& a, const FactoredState<S>& b, double tol = 1e-12) {
  using Poly = FockPolynomial<S>;
  std::unordered_map<std::uint32_t, std::size_t> ids;
  std::vector<std::size_t> parent;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto id_of = [&](ModeLabel m) {
    auto [it, fresh] = ids.try_emplace(m.packed(), parent.size());
    if (fresh) parent.push_back(parent.size());
    return it->second;
  };
  S sa = a.scalar, sb = b.scalar;
  std::vector<std::pair<const Poly*, int>> all;
  for (const auto& f : a.factors) all.emplace_back(&f, 0);
  for (const auto& f : b.factors) all.emplace_back(&f, 1);
  std::vector<std::ptrdiff_t> root_of(all.size(), -1);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto modes = all[i].first->modes();
    if (modes.empty()) {
      // constant factor
      const S c = all[i].first->coefficient(Monomial{});
      (all[i].second == 0 ? sa : sb) *= c;
      continue;
    }
    const std::size_t r0 = id_of(modes[0]);
    for (std::size_t j = 1; j < modes.size(); ++j) parent[find(id_of(modes[j]))] = find(r0);
    root_of[i] = static_cast<std::ptrdiff_t>(r0);
  }
  std::map<std::size_t, std::pair<Poly, Poly>> blocks;
  const S one = ScalarTraits<S>::from_int(1);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (root_of[i] < 0) continue;
    const std::size_t r = find(static_cast<std::size_t>(root_of[i]));
    auto [it, fresh] = blocks.try_emplace(r, Poly::constant(one), Poly::constant(one));
    auto& side = all[i].second == 0 ? it->second.first : it->second.second;
    side = mul(side, *all[i].first);
  }
  S ratio_product = one;
  for (auto& [r, pr] : blocks) {
    auto& [pa, pb] = pr;
    if (pa.is_zero() || pb.is_zero()) return pa.is_zero() && pb.is_zero();
    if (pa.size() != pb.size()) return false;
    const auto ref = pb.sorted_terms().front();
    auto it = pa.terms().find(ref.first);
    if (it == pa.terms().end()) return false;
    const S rb = it->second / ref.second;
    for (const auto& [m, cb] : pb.terms()) {
      auto ja = pa.terms().find(m);
      if (ja == pa.terms().end() || !detail::scalar_near(ja->second, rb * cb, tol)) return false;
    }
    ratio_product *= rb;
  }
  return detail::scalar_near(sa * ratio_product, sb, tol);
}

}  // namespace dicke
