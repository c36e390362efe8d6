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

#include <cmath>

#include "dicke/errors.hpp"
#include "dicke/exact_scalar.hpp"
#include "dicke/fock_algebra.hpp"

namespace dicke {

namespace closed_detail {

inline BigInt factorial(unsigned k) {
  BigInt f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

inline BigInt power(unsigned long base, unsigned long e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);  // 0^0 = 1
  return r;
}

inline void validate(unsigned n, unsigned k) {
  if (n < 1 || k < 1 || k > n) throw ValidationError("need 1 <= k <= n");
}

}  // namespace closed_detail

/// C(n,k) (k!)^4 (n-k)^(n-k) / (2^(2n) n^(n+2k-1) (k+1)^(n-1)), exactly.
inline Rational success_probability_exact(unsigned n, unsigned k) {
  using namespace closed_detail;
  validate(n, k);
  const BigInt fk = factorial(k);
  const BigInt num = binomial(n, k) * fk * fk * fk * fk * power(n - k, n - k);
  const BigInt den = power(2, 2ul * n) * power(n, n + 2ul * k - 1) * power(k + 1, n - 1);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline double success_probability_closed_form(unsigned n, unsigned k) {
  return success_probability_exact(n, k).get_d();
}

/// 2^n n (k+1): number of heralding patterns the feed-forward accepts.
inline BigInt feedforward_factor(unsigned n, unsigned k) {
  return closed_detail::power(2, n) * BigInt(n) * BigInt(k + 1);
}

/// Squared single-pattern amplitude for rational alpha^2, beta^2.
inline Rational canonical_amplitude_squared(unsigned n, unsigned k, const Rational& alpha2, const Rational& beta2) {
  using namespace closed_detail;
  validate(n, k);
  const BigInt fk = factorial(k);
  Rational r(binomial(n, k) * fk * fk * fk * fk,
             power(2, 3ul * n) * power(n, 2ul * k) * power(k + 1, n));
  r.canonicalize();
  Rational b = 1, a = 1;
  for (unsigned i = 0; i < n - k; ++i) b *= beta2;
  for (unsigned i = 0; i < k; ++i) a *= alpha2;
  return r * a * b;
}

/// C(n,k)^(1/2) (k!)^2 / (2^(3n/2) n^k (k+1)^(n/2)) beta^(n-k) alpha^k.
inline double canonical_amplitude(unsigned n, unsigned k, double alpha, double beta) {
  closed_detail::validate(n, k);
  if (std::abs(k * alpha * alpha + beta * beta - 1.0) > 1e-9)
    throw ValidationError("splitting amplitudes must satisfy k alpha^2 + beta^2 = 1");
  const double lead = std::sqrt(binomial(n, k).get_d()) * std::pow(closed_detail::factorial(k).get_d(), 2) /
                      (std::pow(2.0, 1.5 * n) * std::pow(double(n), double(k)) * std::pow(k + 1.0, 0.5 * n));
  return lead * std::pow(beta, double(n - k)) * std::pow(alpha, double(k));
}

struct Splitting {
  double alpha = 0.0, beta = 0.0;
  Rational alpha2, beta2;
};

/// Maximizer of beta^(n-k) alpha^k on k alpha^2 + beta^2 = 1.
inline Splitting optimal_splitting(unsigned n, unsigned k) {
  closed_detail::validate(n, k);
  Splitting s;
  s.alpha2 = ratio(1, long(n));
  s.beta2 = ratio(long(n - k), long(n));
  s.alpha = std::sqrt(1.0 / n);
  s.beta = std::sqrt(double(n - k) / n);
  return s;
}

}  // namespace dicke
