#pragma once

/*
 * Complex special functions used by the differintegral engines.
 *
 * Conventions:
 *   - every complex power is w^a = exp(a * Log w) with Log the principal
 *     branch, arg in (-pi, pi]; a negative real w with a signed-zero imaginary
 *     part is treated as lying on the upper side of the cut;
 *   - 0^0 = 1 and 0^a = 0 for Re(a) > 0;
 *   - 1/Gamma is computed directly so that it is exactly zero at the poles.
 */

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "fracdd/errors.hpp"

namespace fracdd {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

namespace special {

namespace detail {

inline std::string show(Complex z) {
  return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
}

// sin(pi x) and cos(pi x) with exact zeros at the integers / half-integers.
inline double sin_pi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::fmod(x, 2.0);  // (-2, 2)
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r == 0.5 || r == -1.5) return 1.0;
  if (r == -0.5 || r == 1.5) return -1.0;
  return std::sin(kPi * r);
}

inline double cos_pi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::fmod(std::fabs(x), 2.0);  // [0, 2)
  if (r == 0.5 || r == 1.5) return 0.0;
  if (r == 0.0) return 1.0;
  if (r == 1.0) return -1.0;
  return std::cos(kPi * r);
}

inline Complex sin_pi(Complex z) {
  const double x = z.real(), y = z.imag();
  if (y == 0.0) return {sin_pi(x), 0.0};
  return {sin_pi(x) * std::cosh(kPi * y), cos_pi(x) * std::sinh(kPi * y)};
}

inline Complex cos_pi(Complex z) {
  const double x = z.real(), y = z.imag();
  if (y == 0.0) return {cos_pi(x), 0.0};
  return {cos_pi(x) * std::cosh(kPi * y), -sin_pi(x) * std::sinh(kPi * y)};
}

// Lanczos approximation, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(z) for Re(z) >= 0.5.
inline Complex log_gamma_right(Complex z) {
  z -= 1.0;
  Complex x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + double(i));
  const Complex t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace detail

/// True when z is (numerically) a real integer.
inline bool is_integer(Complex z, double tol = 1e-12) {
  if (std::fabs(z.imag()) > tol) return false;
  return std::fabs(z.real() - std::round(z.real())) <= tol * std::max(1.0, std::fabs(z.real()));
}

inline bool is_nonpositive_integer(Complex z, double tol = 1e-12) {
  return is_integer(z, tol) && std::round(z.real()) <= 0.0;
}

/// Principal logarithm; a zero imaginary part of either sign counts as +0.
inline Complex log_principal(Complex w) {
  if (w.imag() == 0.0) w = {w.real(), 0.0};
  return std::log(w);
}

/// w^a on the principal branch with 0^0 = 1.
inline Complex cpow(Complex w, Complex a) {
  if (w == Complex{}) {
    if (a == Complex{}) return 1.0;
    if (a.real() > 0.0) return 0.0;
    throw PoleError("0^a with Re(a) <= 0 is singular, a = " + detail::show(a));
  }
  if (a == Complex{}) return 1.0;
  if (a.imag() == 0.0 && a.real() == std::round(a.real()) && std::fabs(a.real()) <= 64.0) {
    // exact integer powers; identical to the principal branch
    Complex base = a.real() < 0 ? 1.0 / w : w;
    long n = std::lround(std::fabs(a.real()));
    Complex r = 1.0;
    while (n > 0) {
      if (n & 1) r *= base;
      base *= base;
      n >>= 1;
    }
    return r;
  }
  return std::exp(a * log_principal(w));
}

inline Complex gamma(Complex z) {
  if (is_nonpositive_integer(z, 0.0))
    throw PoleError("gamma: pole at " + detail::show(z));
  if (z.real() < 0.5) {
    const Complex s = detail::sin_pi(z);
    if (s == Complex{}) throw PoleError("gamma: pole at " + detail::show(z));
    return kPi / (s * std::exp(detail::log_gamma_right(1.0 - z)));
  }
  if (z.imag() == 0.0 && z.real() == std::round(z.real()) && z.real() <= 25.0) {
    double f = 1.0;
    for (int k = 2; k < int(z.real()); ++k) f *= k;
    return f;
  }
  return std::exp(detail::log_gamma_right(z));
}

/// log Gamma(z), principal value of the log of the right-half-plane formula.
inline Complex log_gamma(Complex z) {
  if (is_nonpositive_integer(z, 0.0))
    throw PoleError("log_gamma: pole at " + detail::show(z));
  if (z.real() < 0.5)
    return std::log(kPi) - log_principal(detail::sin_pi(z)) - detail::log_gamma_right(1.0 - z);
  return detail::log_gamma_right(z);
}

/// 1/Gamma(z); entire, and exactly zero at z = 0, -1, -2, ...
inline Complex reciprocal_gamma(Complex z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real())) return 0.0;
  if (z.real() < 0.5)
    return detail::sin_pi(z) * std::exp(detail::log_gamma_right(1.0 - z)) / kPi;
  if (z.imag() == 0.0 && z.real() == std::round(z.real()) && z.real() <= 25.0)
    return 1.0 / gamma(z).real();
  return std::exp(-detail::log_gamma_right(z));
}

inline Complex digamma(Complex z) {
  if (is_nonpositive_integer(z, 0.0))
    throw PoleError("digamma: pole at " + detail::show(z));
  if (z.real() < 0.5) {
    return digamma(1.0 - z) - kPi * detail::cos_pi(z) / detail::sin_pi(z);
  }
  Complex acc = 0.0;
  while (std::abs(z) < 12.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const Complex w = 1.0 / (z * z);
  // Bernoulli tail: sum B_2k / (2k z^2k)
  const Complex tail =
      w * (1.0 / 12 -
           w * (1.0 / 120 -
                w * (1.0 / 252 -
                     w * (1.0 / 240 - w * (1.0 / 132 - w * (691.0 / 32760 - w / 12.0))))));
  return acc + std::log(z) - 0.5 / z - tail;
}

/// psi(x) / Gamma(x), finite everywhere: at x = -k the digamma pole cancels the
/// zero of 1/Gamma, leaving -(-1)^k k!.
inline Complex digamma_times_reciprocal_gamma(Complex x) {
  if (x.real() >= 0.5) return digamma(x) * reciprocal_gamma(x);
  const Complex g = gamma(1.0 - x);
  return g * (digamma(1.0 - x) * detail::sin_pi(x) / kPi - detail::cos_pi(x));
}

/// Confluent hypergeometric 1F1(a; b; z) by its power series, |z| <= 50.
inline Complex kummer_1f1(Complex a, Complex b, Complex z) {
  if (std::abs(z) > 50.0)
    throw DomainError("kummer_1f1: |z| > 50 is outside the supported range");
  bool terminating = false;
  if (is_nonpositive_integer(b, 0.0)) {
    // allowed only when the series stops before the vanishing denominator
    if (is_nonpositive_integer(a, 0.0) && a.real() >= b.real())
      terminating = true;
    else
      throw PoleError("kummer_1f1: b = " + detail::show(b) + " is a non-positive integer");
  }
  if (is_nonpositive_integer(a, 0.0)) terminating = true;
  if (z == Complex{}) return 1.0;
  if (!terminating && z.real() < 0.0) return std::exp(z) * kummer_1f1(b - a, b, -z);

  Complex sum = 1.0, term = 1.0;
  if (terminating) {
    const long m = std::lround(-a.real());
    for (long k = 0; k < m; ++k) {
      term *= (a + double(k)) / (b + double(k)) * z / double(k + 1);
      sum += term;
    }
    return sum;
  }
  int small = 0;
  for (int k = 0; k < 10000; ++k) {
    term *= (a + double(k)) / (b + double(k)) * z / double(k + 1);
    sum += term;
    if (term == Complex{}) return sum;
    if (std::abs(term) <= 1e-16 * std::abs(sum)) {
      if (++small >= 2 && double(k) > std::abs(z) + std::abs(a)) return sum;
    } else {
      small = 0;
    }
  }
  throw NonConvergenceError("kummer_1f1: series did not converge in 10^4 terms");
}

/// Riemann zeta for Re(s) > 1 via Euler-Maclaurin summation.
inline Complex riemann_zeta(Complex s) {
  if (s.real() <= 1.0)
    throw DomainError("riemann_zeta: supported only for Re(s) > 1, s = " + detail::show(s));
  static constexpr std::array<double, 10> kB2k = {
      1.0 / 6,      -1.0 / 30,       1.0 / 42,       -1.0 / 30,   5.0 / 66,
      -691.0 / 2730, 7.0 / 6,        -3617.0 / 510,  43867.0 / 798, -174611.0 / 330};
  const int n = 20 + int(std::abs(s));
  Complex sum = 0.0;
  for (int k = 1; k < n; ++k) sum += std::exp(-s * std::log(double(k)));
  const double big_n = n;
  const Complex n_pow = std::exp(-s * std::log(big_n));  // N^{-s}
  sum += n_pow * big_n / (s - 1.0) + 0.5 * n_pow;
  // sum_k B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  Complex rising = s;       // s(s+1)...(s+2k-2)
  double fact = 2.0;        // (2k)!
  Complex npow = n_pow / big_n;  // N^{-s-1}
  for (std::size_t k = 1; k <= kB2k.size(); ++k) {
    const Complex t = kB2k[k - 1] / fact * rising * npow;
    sum += t;
    if (std::abs(t) < 1e-17 * std::abs(sum)) break;
    rising *= (s + double(2 * k - 1)) * (s + double(2 * k));
    fact *= double(2 * k + 1) * double(2 * k + 2);
    npow /= big_n * big_n;
  }
  return sum;
}

/// Li_s(x) = sum_{k>=1} x^k / k^s for |x| < 1, or x = 1 with Re(s) > 1.
inline Complex polylog(Complex s, Complex x) {
  if (x == Complex{}) return 0.0;
  const double r = std::abs(x);
  if (x == Complex{1.0, 0.0}) {
    if (s.real() > 1.0) return riemann_zeta(s);
    throw DomainError("polylog: Li_s(1) requires Re(s) > 1");
  }
  if (r >= 1.0)
    throw DomainError("polylog: |x| >= 1 is outside the supported region (no continuation)");
  if (s == Complex{1.0, 0.0}) return -std::log(1.0 - x);
  if (s == Complex{}) return x / (1.0 - x);
  const Complex logx = log_principal(x);
  Complex sum = 0.0;
  constexpr long kMaxTerms = 4'000'000;
  for (long k = 1; k <= kMaxTerms; ++k) {
    const double lk = std::log(double(k));
    const Complex term = std::exp(double(k) * logx - s * lk);
    sum += term;
    // remaining tail is bounded by |term| * r / (1 - r) once k^{-Re s} is non-increasing
    const double bound = std::abs(term) * r / (1.0 - r);
    if (k > 2 && (s.real() >= 0.0 || double(k) > -s.real() / -std::log(r)) &&
        bound <= 1e-15 * std::max(std::abs(sum), 1e-300))
      return sum;
  }
  throw NonConvergenceError("polylog: series did not converge (|x| too close to 1)");
}

/// Mittag-Leffler E_alpha(z) = sum_j z^j / Gamma(1 + j alpha), |z| <= 30.
inline Complex mittag_leffler(double alpha, Complex z) {
  if (!(alpha > 0.0)) throw DomainError("mittag_leffler: alpha must be positive");
  if (std::abs(z) > 30.0) throw DomainError("mittag_leffler: |z| > 30 is outside the supported range");
  if (z == Complex{}) return 1.0;
  const Complex logz = log_principal(z);
  const double logr = std::log(std::abs(z));
  Complex sum = 0.0;
  for (int j = 0; j < 100000; ++j) {
    const double lg = std::lgamma(1.0 + j * alpha);
    const double mag = std::exp(j * logr - lg);
    const Complex term = mag * std::exp(Complex{0.0, j * logz.imag()});
    sum += term;
    // terms decrease monotonically once Gamma grows faster than |z|^j
    if (j * alpha > 2.0 * std::abs(z) + 2.0 && mag < 1e-14 * std::max(1.0, std::abs(sum)))
      return sum;
  }
  throw NonConvergenceError("mittag_leffler: series did not converge in 10^5 terms");
}

namespace detail {

inline Complex tricomi_u_generic(Complex a, Complex b, Complex x) {
  const Complex t1 = gamma(1.0 - b) * reciprocal_gamma(a - b + 1.0) * kummer_1f1(a, b, x);
  const Complex t2 = gamma(b - 1.0) * reciprocal_gamma(a) * cpow(x, 1.0 - b) *
                     kummer_1f1(a - b + 1.0, 2.0 - b, x);
  return t1 + t2;
}

}  // namespace detail

/// Tricomi confluent hypergeometric U(a, b, x), x != 0, principal branch.
/// Large Re(x) uses the asymptotic series; integer b is taken as a limit.
inline Complex tricomi_u(Complex a, Complex b, Complex x) {
  if (x == Complex{}) throw SingularError("tricomi_u: x = 0");
  if (x.real() > 25.0 && std::abs(x) > 25.0) {
    // U ~ x^{-a} sum_k (a)_k (a-b+1)_k / k! (-x)^{-k}, truncated at the smallest term
    Complex sum = 1.0, term = 1.0;
    double prev = 1.0;
    for (int k = 0; k < 200; ++k) {
      const Complex next = term * (a + double(k)) * (a - b + double(k + 1)) / (double(k + 1) * -x);
      const double m = std::abs(next);
      if (m > prev) break;
      term = next;
      sum += term;
      prev = m;
      if (m < 1e-17 * std::abs(sum)) break;
    }
    return cpow(x, -a) * sum;
  }
  if (is_integer(b, 1e-9)) {
    // U is analytic in b; Richardson on symmetric differences removes O(d^2)
    const double d = 1e-3;
    const auto avg = [&](double h) {
      return 0.5 * (detail::tricomi_u_generic(a, b + h, x) + detail::tricomi_u_generic(a, b - h, x));
    };
    return (4.0 * avg(d / 2) - avg(d)) / 3.0;
  }
  return detail::tricomi_u_generic(a, b, x);
}

}  // namespace special
}  // namespace fracdd
