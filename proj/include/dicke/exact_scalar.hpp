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

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "dicke/errors.hpp"

namespace dicke {

using Rational = mpq_class;
using BigInt = mpz_class;
using Complex = std::complex<double>;

/// p/q as a canonical rational.
inline Rational ratio(long p, long q) {
  Rational r{BigInt(p), BigInt(q)};
  r.canonicalize();
  return r;
}

/**
 * @brief Element of the cyclotomic field Q(zeta), zeta = exp(2 pi i / 24).
 *
 * Stored in the power basis 1, zeta, ..., zeta^7 modulo the cyclotomic
 * polynomial Phi_24(x) = x^8 - x^4 + 1. The field contains i, sqrt(2),
 * sqrt(3), sqrt(6) and every d-th root of unity for d | 24, which covers all
 * beamsplitter, DFT and splitting amplitudes of the desk-scale instances.
 * Zero testing is exact: an element is zero iff all eight coordinates are.
 */
class Cyclotomic24 {
 public:
  static constexpr int kOrder = 24;
  static constexpr int kDegree = 8;

  Cyclotomic24() = default;
  explicit Cyclotomic24(const Rational& q) { c_[0] = q; }
  explicit Cyclotomic24(long q) { c_[0] = q; }

  /// zeta^e for any integer e.
  static Cyclotomic24 zeta_power(long e) {
    const auto& row = power_table()[static_cast<std::size_t>(mod24(e))];
    Cyclotomic24 out;
    for (int i = 0; i < kDegree; ++i) out.c_[i] = row[i];
    return out;
  }

  const Rational& coeff(int i) const { return c_[i]; }

  bool is_zero() const {
    for (const auto& q : c_)
      if (sgn(q) != 0) return false;
    return true;
  }

  bool is_rational() const {
    for (int i = 1; i < kDegree; ++i)
      if (sgn(c_[i]) != 0) return false;
    return true;
  }

  Cyclotomic24& operator+=(const Cyclotomic24& o) {
    for (int i = 0; i < kDegree; ++i)
      if (sgn(o.c_[i]) != 0) c_[i] += o.c_[i];
    return *this;
  }
  Cyclotomic24& operator-=(const Cyclotomic24& o) {
    for (int i = 0; i < kDegree; ++i)
      if (sgn(o.c_[i]) != 0) c_[i] -= o.c_[i];
    return *this;
  }
  Cyclotomic24 operator-() const {
    Cyclotomic24 out;
    for (int i = 0; i < kDegree; ++i) out.c_[i] = -c_[i];
    return out;
  }
  friend Cyclotomic24 operator+(Cyclotomic24 a, const Cyclotomic24& b) { return a += b; }
  friend Cyclotomic24 operator-(Cyclotomic24 a, const Cyclotomic24& b) { return a -= b; }

  friend Cyclotomic24 operator*(const Cyclotomic24& a, const Cyclotomic24& b) {
    std::array<Rational, 2 * kDegree - 1> t;
    bool any = false;
    for (int i = 0; i < kDegree; ++i) {
      if (sgn(a.c_[i]) == 0) continue;
      for (int j = 0; j < kDegree; ++j) {
        if (sgn(b.c_[j]) == 0) continue;
        t[i + j] += a.c_[i] * b.c_[j];
        any = true;
      }
    }
    Cyclotomic24 out;
    if (!any) return out;
    // zeta^8 = zeta^4 - 1
    for (int i = 2 * kDegree - 2; i >= kDegree; --i) {
      if (sgn(t[i]) == 0) continue;
      t[i - 4] += t[i];
      t[i - 8] -= t[i];
    }
    for (int i = 0; i < kDegree; ++i) out.c_[i] = std::move(t[i]);
    return out;
  }
  Cyclotomic24& operator*=(const Cyclotomic24& o) { return *this = *this * o; }

  Cyclotomic24 scaled(const Rational& q) const {
    Cyclotomic24 out;
    if (sgn(q) == 0) return out;
    for (int i = 0; i < kDegree; ++i)
      if (sgn(c_[i]) != 0) out.c_[i] = c_[i] * q;
    return out;
  }

  /// Image under the automorphism zeta -> zeta^a (gcd(a, 24) = 1).
  Cyclotomic24 galois(int a) const {
    Cyclotomic24 out;
    const auto& table = power_table();
    for (int i = 0; i < kDegree; ++i) {
      if (sgn(c_[i]) == 0) continue;
      const auto& row = table[static_cast<std::size_t>(mod24(static_cast<long>(a) * i))];
      for (int j = 0; j < kDegree; ++j) {
        if (row[j] == 1)
          out.c_[j] += c_[i];
        else if (row[j] == -1)
          out.c_[j] -= c_[i];
        else if (row[j] != 0)
          out.c_[j] += c_[i] * row[j];
      }
    }
    return out;
  }

  /// Complex conjugation is zeta -> zeta^-1.
  Cyclotomic24 conj() const { return galois(kOrder - 1); }

  /// Field norm: product of all eight Galois conjugates (a rational number).
  Rational norm() const {
    Cyclotomic24 acc = *this;
    for (int a : {5, 7, 11, 13, 17, 19, 23}) acc *= galois(a);
    return acc.c_[0];
  }

  Cyclotomic24 inverse() const {
    if (is_zero()) throw std::domain_error("Cyclotomic24: division by zero");
    if (is_rational()) return Cyclotomic24(Rational(1) / c_[0]);
    Cyclotomic24 cofactor(1L);
    for (int a : {5, 7, 11, 13, 17, 19, 23}) cofactor *= galois(a);
    const Rational n = (*this * cofactor).c_[0];
    return cofactor.scaled(Rational(1) / n);
  }

  Complex to_complex() const {
    const auto& z = complex_powers();
    Complex out{0.0, 0.0};
    for (int i = 0; i < kDegree; ++i)
      if (sgn(c_[i]) != 0) out += c_[i].get_d() * z[i];
    return out;
  }

  friend bool operator==(const Cyclotomic24& a, const Cyclotomic24& b) {
    for (int i = 0; i < kDegree; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < kDegree; ++i) {
      if (sgn(c_[i]) == 0) continue;
      if (!first) os << " + ";
      os << "(" << c_[i].get_str() << ")";
      if (i > 0) os << "z^" << i;
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  static long mod24(long e) {
    long r = e % kOrder;
    return r < 0 ? r + kOrder : r;
  }

  using PowerTable = std::array<std::array<int, kDegree>, kOrder>;

  static const PowerTable& power_table() {
    static const PowerTable table = [] {
      PowerTable t{};
      std::array<int, kDegree> v{};
      v[0] = 1;
      for (int e = 0; e < kOrder; ++e) {
        t[static_cast<std::size_t>(e)] = v;
        std::array<int, kDegree> next{};
        for (int i = 0; i + 1 < kDegree; ++i) next[i + 1] = v[i];
        next[4] += v[kDegree - 1];
        next[0] -= v[kDegree - 1];
        v = next;
      }
      return t;
    }();
    return table;
  }

  static const std::array<Complex, kDegree>& complex_powers() {
    static const std::array<Complex, kDegree> z = [] {
      std::array<Complex, kDegree> out{};
      for (int i = 0; i < kDegree; ++i)
        out[i] = std::polar(1.0, 2.0 * std::numbers::pi * i / kOrder);
      return out;
    }();
    return z;
  }

  std::array<Rational, kDegree> c_{};
};

/**
 * @brief Exact complex scalar: a Q(zeta_24) element times sqrt(r).
 *
 * r is a squarefree positive integer coprime to 6 (factors of 2 and 3 live in
 * the field). Sums of values with different radicands are not representable
 * and throw NotRepresentable; products and quotients always are.
 */
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  explicit ExactScalar(const Rational& q) : v_(q) {}
  explicit ExactScalar(Cyclotomic24 v, std::uint64_t radicand = 1)
      : v_(std::move(v)), r_(radicand) {
    if (v_.is_zero()) r_ = 1;
  }

  static ExactScalar rational(long p, long q) {
    return ExactScalar(ratio(p, q));
  }

  static ExactScalar imaginary_unit() { return ExactScalar(Cyclotomic24::zeta_power(6)); }

  /// exp(2 pi i p / d); d must reduce to a divisor of 24.
  static ExactScalar root_of_unity(long p, long d) {
    if (d <= 0) throw std::invalid_argument("root_of_unity: d must be positive");
    long g = std::gcd(p < 0 ? -p : p, d);
    if (g == 0) g = d;
    const long num = p / g, den = d / g;
    if (Cyclotomic24::kOrder % den != 0)
      throw NotRepresentable("root of unity of order " + std::to_string(den) +
                             " is outside Q(zeta_24)");
    return ExactScalar(Cyclotomic24::zeta_power(num * (Cyclotomic24::kOrder / den)));
  }

  /// sqrt(q) for a non-negative rational q.
  static ExactScalar sqrt_rational(const Rational& q_in) {
    Rational q = q_in;
    q.canonicalize();
    if (sgn(q) < 0) throw std::domain_error("sqrt_rational: negative argument");
    if (sgn(q) == 0) return ExactScalar();
    // sqrt(a/b) = sqrt(a b) / b
    BigInt n = q.get_num() * q.get_den();
    BigInt square_root = 1, rest = 1;
    int twos = 0, threes = 0;
    auto strip = [&](unsigned long p, int* parity) {
      int e = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        n /= p;
        ++e;
      }
      for (int i = 0; i < e / 2; ++i) square_root *= p;
      if (e % 2 == 1) {
        if (parity)
          *parity = 1;
        else
          rest *= p;
      }
    };
    strip(2, &twos);
    strip(3, &threes);
    for (unsigned long p = 5; n > 1; p += 2) {
      if (BigInt(p) * p > n) {
        rest *= n;  // n is prime
        n = 1;
        break;
      }
      if (p > 2000000) throw NotRepresentable("sqrt_rational: argument too large to factor");
      strip(p, nullptr);
    }
    if (!rest.fits_ulong_p()) throw NotRepresentable("sqrt_rational: radicand too large");
    Rational lead(square_root, q.get_den());
    lead.canonicalize();
    Cyclotomic24 v(lead);
    if (twos) v *= sqrt2_element();
    if (threes) v *= sqrt3_element();
    return ExactScalar(std::move(v), rest.get_ui());
  }

  const Cyclotomic24& field_part() const { return v_; }
  std::uint64_t radicand() const { return r_; }

  bool is_zero() const { return v_.is_zero(); }
  bool is_real() const { return v_ == v_.conj(); }
  bool is_rational() const { return r_ == 1 && v_.is_rational(); }

  /// The value as a rational; throws unless is_rational().
  Rational to_rational() const {
    if (!is_rational()) throw NotRepresentable("ExactScalar is not rational: " + to_string());
    return v_.coeff(0);
  }

  Complex to_complex() const {
    Complex z = v_.to_complex();
    return r_ == 1 ? z : z * std::sqrt(static_cast<double>(r_));
  }

  ExactScalar conj() const { return ExactScalar(v_.conj(), r_); }

  /// |x|^2, always rational-real with radicand 1.
  ExactScalar abs2() const {
    if (is_zero()) return ExactScalar();
    return ExactScalar(v_ * v_.conj() * Cyclotomic24(static_cast<long>(r_)), 1);
  }

  ExactScalar inverse() const {
    if (is_zero()) throw std::domain_error("ExactScalar: division by zero");
    // 1 / (v sqrt r) = v^-1 sqrt(r) / r
    return ExactScalar(v_.inverse().scaled(Rational{BigInt(1), BigInt(static_cast<unsigned long>(r_))}), r_);
  }

  ExactScalar operator-() const { return ExactScalar(-v_, r_); }

  ExactScalar& operator+=(const ExactScalar& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    if (r_ != o.r_)
      throw NotRepresentable("sum of sqrt(" + std::to_string(r_) + ") and sqrt(" +
                             std::to_string(o.r_) + ") multiples");
    v_ += o.v_;
    if (v_.is_zero()) r_ = 1;
    return *this;
  }
  ExactScalar& operator-=(const ExactScalar& o) { return *this += -o; }

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }

  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_zero() || b.is_zero()) return ExactScalar();
    if (a.r_ == 1 && b.r_ == 1) return ExactScalar(a.v_ * b.v_, 1);
    const std::uint64_t g = std::gcd(a.r_, b.r_);
    Cyclotomic24 v = a.v_ * b.v_;
    if (g != 1) v = v.scaled(Rational(static_cast<unsigned long>(g)));
    return ExactScalar(std::move(v), (a.r_ / g) * (b.r_ / g));
  }
  ExactScalar& operator*=(const ExactScalar& o) { return *this = *this * o; }

  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) { return a * b.inverse(); }
  ExactScalar& operator/=(const ExactScalar& o) { return *this = *this / o; }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.r_ == b.r_ && a.v_ == b.v_;
  }

  std::string to_string() const {
    std::string s = v_.to_string();
    if (r_ != 1) s = "(" + s + ")*sqrt(" + std::to_string(r_) + ")";
    return s;
  }

  static const Cyclotomic24& sqrt2_element() {
    static const Cyclotomic24 s = Cyclotomic24::zeta_power(3) + Cyclotomic24::zeta_power(21);
    return s;
  }
  static const Cyclotomic24& sqrt3_element() {
    static const Cyclotomic24 s = Cyclotomic24::zeta_power(2) + Cyclotomic24::zeta_power(22);
    return s;
  }

 private:
  Cyclotomic24 v_;
  std::uint64_t r_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const ExactScalar& x) { return os << x.to_string(); }

/// Absolute tolerance below which float coefficients are treated as zero.
inline constexpr double kFloatZero = 1e-14;

/**
 * Uniform coefficient interface shared by the exact and floating backends.
 * Every algorithm in the library is written against these hooks.
 */
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<ExactScalar> {
  static constexpr bool kExact = true;
  static constexpr const char* kName = "exact";

  static ExactScalar from_int(long v) { return ExactScalar(v); }
  static ExactScalar rational(long p, long q) { return ExactScalar::rational(p, q); }
  static ExactScalar from_rational(const Rational& q) { return ExactScalar(q); }
  static ExactScalar sqrt_rational(const Rational& q) { return ExactScalar::sqrt_rational(q); }
  static ExactScalar root_of_unity(long p, long d) { return ExactScalar::root_of_unity(p, d); }
  static bool is_zero(const ExactScalar& x) { return x.is_zero(); }
  static ExactScalar conj(const ExactScalar& x) { return x.conj(); }
  static ExactScalar abs2(const ExactScalar& x) { return x.abs2(); }
  static Complex to_complex(const ExactScalar& x) { return x.to_complex(); }
  static double real(const ExactScalar& x) { return x.to_complex().real(); }
  static bool equal(const ExactScalar& a, const ExactScalar& b, double /*tol*/ = 0.0) { return a == b; }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool kExact = false;
  static constexpr const char* kName = "float";

  static Complex from_int(long v) { return {static_cast<double>(v), 0.0}; }
  static Complex rational(long p, long q) { return {static_cast<double>(p) / static_cast<double>(q), 0.0}; }
  static Complex from_rational(const Rational& q) { return {q.get_d(), 0.0}; }
  static Complex sqrt_rational(const Rational& q) { return {std::sqrt(q.get_d()), 0.0}; }
  static Complex root_of_unity(long p, long d) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(d));
  }
  static bool is_zero(const Complex& x) {
    return std::abs(x.real()) <= kFloatZero && std::abs(x.imag()) <= kFloatZero;
  }
  static Complex conj(const Complex& x) { return std::conj(x); }
  static Complex abs2(const Complex& x) { return {std::norm(x), 0.0}; }
  static Complex to_complex(const Complex& x) { return x; }
  static double real(const Complex& x) { return x.real(); }
  static bool equal(const Complex& a, const Complex& b, double tol = 1e-12) { return std::abs(a - b) <= tol; }
};

template <class S>
concept Scalar = requires { ScalarTraits<S>::kExact; };

}  // namespace dicke
