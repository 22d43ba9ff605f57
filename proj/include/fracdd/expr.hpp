#pragma once

/*
 * Normalized term-sum expressions over the closed-form function classes.
 *
 * An Expr is a sum of Terms, each a coefficient times a kernel evaluated at
 * the translated argument (z - shift). Nonzero constants never appear bare:
 * a constant C is stored as C * z^0, which equals C everywhere except at z = 0
 * where it is undefined.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "fracdd/errors.hpp"
#include "fracdd/special.hpp"

namespace fracdd {

/// z^n, n not a negative integer.
struct Monomial { Complex n; };
/// Zero function of the given order: z^{-1-order} / Gamma(-order).
struct ZeroFn { Complex order; };
/// H(z), with H(0) = 1/2.
struct Heaviside {};
/// delta^{(order)}(z) for integer order >= 0; other orders normalize away.
struct DeltaDeriv { Complex order; };
/// H(z) z^power / Gamma(1 + power).
struct HeavisideMonomial { Complex power; };
/// e^{rate z}
struct Exponential { Complex rate; };
/// sin(rate z + phase)
struct Sin { Complex rate; Complex phase; };
/// cos(rate z + phase)
struct Cos { Complex rate; Complex phase; };
/// ln z + ln scale
struct Log { Complex scale; };
/// z^order (ln z + ln scale - gamma - psi(1 + order)) / Gamma(1 + order)
struct LogMonomial { Complex order; Complex scale; };
/// 1 / (e^{-z} - 1)
struct BoseKernel {};
/// Li_s(e^z)
struct PolylogExp { Complex s; };
/// z^n e^{rate z}
struct MonomialExp { Complex n; Complex rate; };
/// Closed form of the order-th differintegral of z^n e^{rate z} (two 1F1 terms).
struct KummerPair { Complex n; Complex rate; Complex order; };

using Kernel = std::variant<Monomial, ZeroFn, Heaviside, DeltaDeriv, HeavisideMonomial,
                            Exponential, Sin, Cos, Log, LogMonomial, BoseKernel, PolylogExp,
                            MonomialExp, KummerPair>;

struct Term {
  Complex coeff{1.0};
  Complex shift{0.0};
  Kernel kernel;
};

struct Expr {
  std::vector<Term> terms;

  static Expr constant(Complex c) { return Expr{{Term{c, 0.0, Monomial{0.0}}}}; }
  static Expr of(Kernel k, Complex coeff = 1.0, Complex shift = 0.0) {
    return Expr{{Term{coeff, shift, std::move(k)}}};
  }
  bool empty() const { return terms.empty(); }
};

inline Expr operator+(Expr a, const Expr& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}
inline Expr operator*(Complex c, Expr e) {
  for (auto& t : e.terms) t.coeff *= c;
  return e;
}
inline Expr operator-(Expr a, const Expr& b) { return a + Complex(-1.0) * b; }

// ---------------------------------------------------------------------------
// parameters and ordering

inline std::vector<Complex> kernel_params(const Kernel& k) {
  return std::visit(
      [](const auto& v) -> std::vector<Complex> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Monomial>) return {v.n};
        else if constexpr (std::is_same_v<T, ZeroFn>) return {v.order};
        else if constexpr (std::is_same_v<T, DeltaDeriv>) return {v.order};
        else if constexpr (std::is_same_v<T, HeavisideMonomial>) return {v.power};
        else if constexpr (std::is_same_v<T, Exponential>) return {v.rate};
        else if constexpr (std::is_same_v<T, Sin> || std::is_same_v<T, Cos>) return {v.rate, v.phase};
        else if constexpr (std::is_same_v<T, Log>) return {v.scale};
        else if constexpr (std::is_same_v<T, LogMonomial>) return {v.order, v.scale};
        else if constexpr (std::is_same_v<T, PolylogExp>) return {v.s};
        else if constexpr (std::is_same_v<T, MonomialExp>) return {v.n, v.rate};
        else if constexpr (std::is_same_v<T, KummerPair>) return {v.n, v.rate, v.order};
        else return {};
      },
      k);
}

inline const char* kernel_name(const Kernel& k) {
  static constexpr const char* kNames[] = {
      "Monomial", "ZeroFn",     "Heaviside", "DeltaDeriv", "HeavisideMonomial",
      "Exponential", "Sin",     "Cos",       "Log",        "LogMonomial",
      "BoseKernel", "PolylogExp", "MonomialExp", "KummerPair"};
  return kNames[k.index()];
}

namespace detail {

inline auto sort_key(const Term& t) {
  std::vector<double> key;
  key.push_back(double(t.kernel.index()));
  for (Complex p : kernel_params(t.kernel)) {
    key.push_back(p.real());
    key.push_back(p.imag());
  }
  key.push_back(t.shift.real());
  key.push_back(t.shift.imag());
  return key;
}

inline bool same_kernel(const Term& a, const Term& b) {
  return a.kernel.index() == b.kernel.index() && a.shift == b.shift &&
         kernel_params(a.kernel) == kernel_params(b.kernel);
}

// Snap a value within tol of an integer onto it (keeps parameter equality exact).
inline Complex snap(Complex z) {
  if (special::is_integer(z, 1e-12)) return {std::round(z.real()), 0.0};
  return z;
}

inline Complex wrap_phase(Complex phi) {
  double r = std::remainder(phi.real(), 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  if (std::fabs(r) < 1e-15) r = 0.0;
  return {r, phi.imag()};
}

inline bool is_negative_integer(Complex z) {
  return special::is_integer(z, 1e-12) && std::round(z.real()) < 0.0;
}

inline bool is_nonnegative_integer(Complex z) {
  return special::is_integer(z, 1e-12) && std::round(z.real()) >= 0.0;
}

// Rewrite one term into its canonical kernel form. May return several terms
// (never more than one today) or none.
inline Term canonical(Term t) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::visit(
        [&](auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Monomial>) {
            v.n = snap(v.n);
            if (is_negative_integer(v.n))
              throw DomainError(
                  "z^n with negative integer n is ambiguous: write it as a zero function "
                  "zero(k) (monomial class) or as a derivative of ln (logarithm class)");
          } else if constexpr (std::is_same_v<T, ZeroFn>) {
            v.order = snap(v.order);
            if (is_negative_integer(v.order)) {
              // zero(-1-m) = z^m / m!
              const Complex m = -1.0 - v.order;
              t.coeff *= special::reciprocal_gamma(1.0 + m);
              t.kernel = Monomial{m};
              changed = true;
            }
          } else if constexpr (std::is_same_v<T, DeltaDeriv>) {
            v.order = snap(v.order);
            if (!is_nonnegative_integer(v.order)) {
              t.kernel = HeavisideMonomial{-1.0 - v.order};
              changed = true;
            }
          } else if constexpr (std::is_same_v<T, HeavisideMonomial>) {
            v.power = snap(v.power);
            if (v.power == Complex{}) {
              t.kernel = Heaviside{};
              changed = true;
            } else if (is_negative_integer(v.power)) {
              t.kernel = DeltaDeriv{-1.0 - v.power};
              changed = true;
            }
          } else if constexpr (std::is_same_v<T, Exponential>) {
            if (v.rate == Complex{}) {
              t.kernel = Monomial{0.0};
              changed = true;
            }
          } else if constexpr (std::is_same_v<T, Sin> || std::is_same_v<T, Cos>) {
            if (v.rate.imag() == 0.0 && v.rate.real() < 0.0) {
              // sin(-a z + p) = -sin(a z - p), cos(-a z + p) = cos(a z - p)
              v.rate = -v.rate;
              v.phase = -v.phase;
              if constexpr (std::is_same_v<T, Sin>) t.coeff = -t.coeff;
            }
            v.phase = wrap_phase(v.phase);
            if (v.rate == Complex{}) {
              t.coeff *= std::is_same_v<T, Sin> ? std::sin(v.phase) : std::cos(v.phase);
              t.kernel = Monomial{0.0};
              changed = true;
            }
          } else if constexpr (std::is_same_v<T, LogMonomial>) {
            v.order = snap(v.order);
            if (v.order == Complex{}) {
              t.kernel = Log{v.scale};
              changed = true;
            }
          } else if constexpr (std::is_same_v<T, PolylogExp>) {
            v.s = snap(v.s);
            if (v.s == Complex{}) {
              t.kernel = BoseKernel{};
              changed = true;
            }
          } else if constexpr (std::is_same_v<T, MonomialExp>) {
            v.n = snap(v.n);
            if (v.rate == Complex{}) {
              t.kernel = Monomial{v.n};
              changed = true;
            } else if (v.n == Complex{}) {
              t.kernel = Exponential{v.rate};
              changed = true;
            } else if (is_negative_integer(v.n)) {
              throw DomainError("z^n e^{rate z} with negative integer n is not supported");
            }
          } else if constexpr (std::is_same_v<T, KummerPair>) {
            v.n = snap(v.n);
            v.order = snap(v.order);
            if (v.order == Complex{}) {
              t.kernel = MonomialExp{v.n, v.rate};
              changed = true;
            }
          }
        },
        t.kernel);
  }
  return t;
}

}  // namespace detail

/// Canonical form: constants as C z^0, kernels in canonical parameterization,
/// like terms merged, zero coefficients dropped, terms sorted.
inline Expr normalize(const Expr& raw) {
  std::vector<Term> out;
  out.reserve(raw.terms.size());
  for (const Term& t : raw.terms) {
    if (t.coeff == Complex{}) continue;
    Term c = detail::canonical(t);
    if (c.coeff == Complex{}) continue;
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Term& a, const Term& b) {
    return detail::sort_key(a) < detail::sort_key(b);
  });
  std::vector<Term> merged;
  for (Term& t : out) {
    if (!merged.empty() && detail::same_kernel(merged.back(), t))
      merged.back().coeff += t.coeff;
    else
      merged.push_back(std::move(t));
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == Complex{}; });
  return Expr{std::move(merged)};
}

/// Structural equality of two normalized expressions, parameters and
/// coefficients compared to a relative tolerance; phases modulo 2 pi.
inline bool structurally_equal(const Expr& a, const Expr& b, double rel_tol = 1e-9) {
  if (a.terms.size() != b.terms.size()) return false;
  const auto close = [&](Complex x, Complex y) {
    return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)});
  };
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    const Term& s = a.terms[i];
    const Term& t = b.terms[i];
    if (s.kernel.index() != t.kernel.index()) return false;
    if (!close(s.coeff, t.coeff) || !close(s.shift, t.shift)) return false;
    const auto ps = kernel_params(s.kernel), pt = kernel_params(t.kernel);
    const bool trig = std::holds_alternative<Sin>(s.kernel) || std::holds_alternative<Cos>(s.kernel);
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (trig && j == 1) {
        const Complex d = detail::wrap_phase(ps[j] - pt[j]);
        if (!close(d, 0.0)) return false;
      } else if (!close(ps[j], pt[j])) {
        return false;
      }
    }
  }
  return true;
}

/// Shift every term's argument by z0: f(z) -> f(z - z0).
inline Expr translate(Expr e, Complex z0) {
  for (auto& t : e.terms) t.shift += z0;
  return e;
}

// ---------------------------------------------------------------------------
// pointwise evaluation

namespace detail {

inline bool power_vanishes_at_zero(Complex p) { return p.real() > 0.0; }

inline Complex kummer_pair_value_direct(const KummerPair& k, Complex w) {
  using namespace special;
  const Complex n = k.n, lam = k.rate, a = k.order;
  const Complex x = lam * w;
  const bool integer_n = is_integer(n, 0.0) && n.real() >= 0.0;
  const Complex phase_n = integer_n ? Complex((std::lround(n.real()) % 2) ? -1.0 : 1.0)
                                    : std::exp(Complex(0.0, kPi) * n);
  // B-term: e^{i pi n} Gamma(n+a)/Gamma(a) lam^{-n-a} e^{x} 1F1(-n; 1-n-a; -x)
  Complex ratio;
  if (integer_n) {
    ratio = 1.0;  // rising factorial (a)_n
    for (long j = 0; j < std::lround(n.real()); ++j) ratio *= a + double(j);
  } else {
    ratio = gamma(n + a) * reciprocal_gamma(a);
  }
  Complex value = 0.0;
  if (ratio != Complex{})
    value += phase_n * ratio * cpow(lam, -n - a) * std::exp(x) * kummer_1f1(-n, 1.0 - n - a, -x);
  if (!integer_n) {
    // A-term: Gamma(1+n) Gamma(-n-a)/pi [e^{i pi n} sin(pi a) - sin(pi(n+a))] w^{n+a} 1F1(1+n; 1+n+a; x)
    const Complex bracket = phase_n * special::detail::sin_pi(a) - special::detail::sin_pi(n + a);
    if (bracket != Complex{}) {
      const Complex coeff = gamma(1.0 + n) * gamma(-n - a) / kPi * bracket;
      value += coeff * cpow(w, n + a) * kummer_1f1(1.0 + n, 1.0 + n + a, x);
    }
  }
  return value;
}

// At n + order integer (non-integer n), or integer order <= 0 (integer n),
// the two terms carry cancelling poles; the value there is the limit in
// order, taken by symmetric Richardson extrapolation.
inline Complex kummer_pair_value(const KummerPair& k, Complex w) {
  const bool integer_n = special::is_integer(k.n, 0.0);
  const bool degenerate =
      integer_n ? (special::is_integer(k.order, 1e-7) && k.order.real() < 0.5)
                : special::is_integer(k.n + k.order, 1e-7);
  if (!degenerate) return kummer_pair_value_direct(k, w);
  const auto g = [&](double d) {
    return 0.5 * (kummer_pair_value_direct({k.n, k.rate, k.order + d}, w) +
                  kummer_pair_value_direct({k.n, k.rate, k.order - d}, w));
  };
  const double d = 1e-2;
  const Complex g1 = g(d), g2 = g(d / 2), g3 = g(d / 4);
  const Complex r1 = (4.0 * g2 - g1) / 3.0, r2 = (4.0 * g3 - g2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

// Returns nullopt at a singular point.
inline std::optional<Complex> kernel_value(const Kernel& kernel, Complex w) {
  using special::cpow;
  using special::reciprocal_gamma;
  const bool at_zero = (w == Complex{});
  return std::visit(
      [&](const auto& v) -> std::optional<Complex> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Monomial>) {
          if (at_zero) return power_vanishes_at_zero(v.n) ? std::optional<Complex>(0.0) : std::nullopt;
          return cpow(w, v.n);
        } else if constexpr (std::is_same_v<T, ZeroFn>) {
          const Complex rg = reciprocal_gamma(-v.order);
          if (at_zero) {
            if (power_vanishes_at_zero(-1.0 - v.order)) return Complex(0.0);
            return std::nullopt;
          }
          if (rg == Complex{}) return Complex(0.0);
          return cpow(w, -1.0 - v.order) * rg;
        } else if constexpr (std::is_same_v<T, Heaviside>) {
          if (w.real() > 0.0) return Complex(1.0);
          if (w.real() < 0.0) return Complex(0.0);
          return Complex(0.5);
        } else if constexpr (std::is_same_v<T, DeltaDeriv>) {
          if (at_zero) return std::nullopt;
          return Complex(0.0);
        } else if constexpr (std::is_same_v<T, HeavisideMonomial>) {
          if (w.real() < 0.0) return Complex(0.0);
          if (at_zero) return power_vanishes_at_zero(v.power) ? std::optional<Complex>(0.0) : std::nullopt;
          return cpow(w, v.power) * reciprocal_gamma(1.0 + v.power);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return std::exp(v.rate * w);
        } else if constexpr (std::is_same_v<T, Sin>) {
          return std::sin(v.rate * w + v.phase);
        } else if constexpr (std::is_same_v<T, Cos>) {
          return std::cos(v.rate * w + v.phase);
        } else if constexpr (std::is_same_v<T, Log>) {
          if (at_zero) return std::nullopt;
          return special::log_principal(w) + special::log_principal(v.scale);
        } else if constexpr (std::is_same_v<T, LogMonomial>) {
          if (at_zero) return power_vanishes_at_zero(v.order) ? std::optional<Complex>(0.0) : std::nullopt;
          const Complex l = special::log_principal(w) + special::log_principal(v.scale) - kEulerGamma;
          return cpow(w, v.order) * (l * reciprocal_gamma(1.0 + v.order) -
                                     special::digamma_times_reciprocal_gamma(1.0 + v.order));
        } else if constexpr (std::is_same_v<T, BoseKernel>) {
          if (at_zero) return std::nullopt;
          if (w.imag() == 0.0) return Complex(1.0 / std::expm1(-w.real()));
          return 1.0 / (std::exp(-w) - 1.0);
        } else if constexpr (std::is_same_v<T, PolylogExp>) {
          if (w.real() > 0.0)
            throw DomainError("Li_s(e^z) is only supported for Re(z) <= 0");
          if (at_zero) {
            if (v.s.real() > 1.0) return special::riemann_zeta(v.s);
            return std::nullopt;
          }
          return special::polylog(v.s, std::exp(w));
        } else if constexpr (std::is_same_v<T, MonomialExp>) {
          if (at_zero) return power_vanishes_at_zero(v.n) ? std::optional<Complex>(0.0) : std::nullopt;
          return cpow(w, v.n) * std::exp(v.rate * w);
        } else if constexpr (std::is_same_v<T, KummerPair>) {
          if (at_zero && !(special::is_integer(v.n, 0.0) && v.n.real() >= 0.0) &&
              !power_vanishes_at_zero(v.n + v.order))
            return std::nullopt;
          return kummer_pair_value(v, w);
        }
      },
      kernel);
}

}  // namespace detail

/// Evaluate the expression at z; nullopt when any term is at its singular point.
inline std::optional<Complex> evaluate(const Expr& e, Complex z) {
  Complex sum = 0.0;
  for (const Term& t : e.terms) {
    const auto v = detail::kernel_value(t.kernel, z - t.shift);
    if (!v) return std::nullopt;
    sum += t.coeff * *v;
  }
  return sum;
}

/// As evaluate, but a singular point raises SingularError.
inline Complex evaluate_at(const Expr& e, Complex z) {
  const auto v = evaluate(e, z);
  if (!v) throw SingularError("expression is singular at z = " + special::detail::show(z));
  return *v;
}

// ---------------------------------------------------------------------------
// products within the closure

namespace detail {

// Exponential-type kernels have no preferred origin: re-express them about
// `shift` by moving the translation into the coefficient / phase.
inline std::optional<Term> realign(const Term& t, Complex shift) {
  if (t.shift == shift) return t;
  const Complex d = shift - t.shift;  // kernel(z - s) = kernel((z - shift) + d)
  Term r = t;
  r.shift = shift;
  if (auto* e = std::get_if<Exponential>(&r.kernel)) {
    r.coeff *= std::exp(e->rate * d);
    return r;
  }
  if (auto* s = std::get_if<Sin>(&r.kernel)) {
    s->phase += s->rate * d;
    return r;
  }
  if (auto* c = std::get_if<Cos>(&r.kernel)) {
    c->phase += c->rate * d;
    return r;
  }
  if (std::holds_alternative<Monomial>(r.kernel) &&
      std::get<Monomial>(r.kernel).n == Complex{})
    return r;  // z^0 is shift-invariant away from its singular point
  return std::nullopt;
}

inline bool is_shift_free(const Term& t) {
  return std::holds_alternative<Exponential>(t.kernel) || std::holds_alternative<Sin>(t.kernel) ||
         std::holds_alternative<Cos>(t.kernel) ||
         (std::holds_alternative<Monomial>(t.kernel) && std::get<Monomial>(t.kernel).n == Complex{});
}

// Sin / Cos as two exponentials.
inline Expr trig_to_exponentials(const Term& t) {
  const Complex I(0.0, 1.0);
  if (const auto* s = std::get_if<Sin>(&t.kernel)) {
    // sin(u) = (e^{iu} - e^{-iu}) / 2i
    return Expr{{Term{t.coeff * std::exp(I * s->phase) / (2.0 * I), t.shift, Exponential{I * s->rate}},
                 Term{-t.coeff * std::exp(-I * s->phase) / (2.0 * I), t.shift, Exponential{-I * s->rate}}}};
  }
  const auto& c = std::get<Cos>(t.kernel);
  return Expr{{Term{t.coeff * std::exp(I * c.phase) / 2.0, t.shift, Exponential{I * c.rate}},
               Term{t.coeff * std::exp(-I * c.phase) / 2.0, t.shift, Exponential{-I * c.rate}}}};
}

inline Expr multiply_terms(Term a, Term b) {
  a = canonical(a);
  b = canonical(b);
  // constant z^0 factors
  auto is_unit = [](const Term& t) {
    return std::holds_alternative<Monomial>(t.kernel) && std::get<Monomial>(t.kernel).n == Complex{};
  };
  if (is_unit(b)) return Expr{{Term{a.coeff * b.coeff, a.shift, a.kernel}}};
  if (is_unit(a)) return Expr{{Term{a.coeff * b.coeff, b.shift, b.kernel}}};

  const bool trig_a = std::holds_alternative<Sin>(a.kernel) || std::holds_alternative<Cos>(a.kernel);
  const bool trig_b = std::holds_alternative<Sin>(b.kernel) || std::holds_alternative<Cos>(b.kernel);
  if (trig_a || trig_b) {
    Expr ea = trig_a ? trig_to_exponentials(a) : Expr{{a}};
    Expr eb = trig_b ? trig_to_exponentials(b) : Expr{{b}};
    Expr out;
    for (const Term& x : ea.terms)
      for (const Term& y : eb.terms) out = out + multiply_terms(x, y);
    return out;
  }
  if (is_shift_free(a) && !is_shift_free(b)) std::swap(a, b);
  // now a is the term whose origin wins
  if (auto r = realign(b, a.shift)) b = *r;
  if (a.shift != b.shift)
    throw UnsupportedError("product of kernels with different translations is not supported");

  const Complex c = a.coeff * b.coeff;
  const Complex s = a.shift;
  const auto make = [&](Kernel k, Complex extra = 1.0) { return Expr{{Term{c * extra, s, std::move(k)}}}; };

  // normalize zero functions of fractional order to scaled monomials for products
  auto as_monomial = [](const Term& t) -> std::optional<std::pair<Complex, Complex>> {
    if (const auto* m = std::get_if<Monomial>(&t.kernel)) return std::pair{m->n, Complex(1.0)};
    if (const auto* z = std::get_if<ZeroFn>(&t.kernel)) {
      if (detail::is_nonnegative_integer(z->order)) return std::nullopt;
      return std::pair{-1.0 - z->order, special::reciprocal_gamma(-z->order)};
    }
    return std::nullopt;
  };

  const auto* ea = std::get_if<Exponential>(&a.kernel);
  const auto* eb = std::get_if<Exponential>(&b.kernel);
  if (ea && eb) return make(Exponential{ea->rate + eb->rate});
  if (eb) {
    if (auto m = as_monomial(a)) return make(MonomialExp{m->first, eb->rate}, m->second);
    if (const auto* me = std::get_if<MonomialExp>(&a.kernel)) return make(MonomialExp{me->n, me->rate + eb->rate});
  }
  if (ea) {
    if (auto m = as_monomial(b)) return make(MonomialExp{m->first, ea->rate}, m->second);
    if (const auto* me = std::get_if<MonomialExp>(&b.kernel)) return make(MonomialExp{me->n, me->rate + ea->rate});
  }
  auto ma = as_monomial(a), mb = as_monomial(b);
  if (ma && mb) return make(Monomial{ma->first + mb->first}, ma->second * mb->second);
  if (ma) {
    if (const auto* me = std::get_if<MonomialExp>(&b.kernel))
      return make(MonomialExp{ma->first + me->n, me->rate}, ma->second);
    if (std::holds_alternative<Heaviside>(b.kernel))
      return make(HeavisideMonomial{ma->first}, ma->second * special::gamma(1.0 + ma->first));
    if (const auto* hm = std::get_if<HeavisideMonomial>(&b.kernel)) {
      const Complex p = hm->power + ma->first;
      return make(HeavisideMonomial{p}, ma->second * special::reciprocal_gamma(1.0 + hm->power) *
                                            special::gamma(1.0 + p));
    }
  }
  if (mb) return multiply_terms(b, a);
  throw UnsupportedError(std::string("no product rule for ") + kernel_name(a.kernel) + " * " +
                         kernel_name(b.kernel));
}

}  // namespace detail

/// Product of two expressions, distributed term by term; supported only for
/// the monomial / exponential / trigonometric / Heaviside-monomial closure.
inline Expr multiply(const Expr& a, const Expr& b) {
  Expr out;
  for (const Term& x : a.terms)
    for (const Term& y : b.terms) out = out + detail::multiply_terms(x, y);
  return normalize(out);
}

// ---------------------------------------------------------------------------
// rendering

inline std::string format_real(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_real(z.real());
  if (z.real() == 0.0) return "(" + format_real(z.imag()) + "i)";
  const std::string sign = z.imag() < 0 ? "-" : "+";
  return "(" + format_real(z.real()) + sign + format_real(std::fabs(z.imag())) + "i)";
}

namespace detail {

// Renders a power exponent or a parenthesised argument safely.
inline std::string atom(Complex z) {
  const std::string s = format_complex(z);
  return (z.imag() == 0.0 && z.real() < 0.0) ? "(" + s + ")" : s;
}

inline std::string linear(Complex rate, const std::string& var) {
  if (rate == Complex(1.0)) return var;
  if (rate == Complex(-1.0)) return "-" + var;
  return atom(rate) + "*" + var;
}

inline std::string render_kernel(const Kernel& k, const std::string& var) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Monomial>) {
          if (v.n == Complex(1.0)) return var;
          return var + "^" + atom(v.n);
        } else if constexpr (std::is_same_v<T, ZeroFn>) {
          return "zero(" + format_complex(v.order) + ", " + var + ")";
        } else if constexpr (std::is_same_v<T, Heaviside>) {
          return "H(" + var + ")";
        } else if constexpr (std::is_same_v<T, DeltaDeriv>) {
          return "delta(" + format_complex(v.order) + ", " + var + ")";
        } else if constexpr (std::is_same_v<T, HeavisideMonomial>) {
          return "H(" + var + ")*" + var + "^" + atom(v.power) + "/gamma(" +
                 format_complex(1.0 + v.power) + ")";
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return "exp(" + linear(v.rate, var) + ")";
        } else if constexpr (std::is_same_v<T, Sin> || std::is_same_v<T, Cos>) {
          std::string arg = linear(v.rate, var);
          if (v.phase != Complex{}) {
            if (v.phase.imag() == 0.0 && v.phase.real() < 0.0)
              arg += " - " + format_real(-v.phase.real());
            else
              arg += " + " + format_complex(v.phase);
          }
          return std::string(std::is_same_v<T, Sin> ? "sin(" : "cos(") + arg + ")";
        } else if constexpr (std::is_same_v<T, Log>) {
          return "ln(" + linear(v.scale, var) + ")";
        } else if constexpr (std::is_same_v<T, LogMonomial>) {
          return "lnm(" + format_complex(v.order) + ", " + format_complex(v.scale) + ", " + var + ")";
        } else if constexpr (std::is_same_v<T, BoseKernel>) {
          return "bose(" + var + ")";
        } else if constexpr (std::is_same_v<T, PolylogExp>) {
          return "Li(" + format_complex(v.s) + ", exp(" + var + "))";
        } else if constexpr (std::is_same_v<T, MonomialExp>) {
          const std::string m = v.n == Complex(1.0) ? var : var + "^" + atom(v.n);
          return m + "*exp(" + linear(v.rate, var) + ")";
        } else if constexpr (std::is_same_v<T, KummerPair>) {
          return "kummer(" + format_complex(v.n) + ", " + format_complex(v.rate) + ", " +
                 format_complex(v.order) + ", " + var + ")";
        }
      },
      k);
}

}  // namespace detail

/// Human-readable form; re-parses to the same normalized expression.
inline std::string to_string(const Expr& e, const std::string& var = "z") {
  if (e.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const Term& t = e.terms[i];
    std::string v = var;
    if (t.shift != Complex{}) {
      if (t.shift.imag() == 0.0 && t.shift.real() < 0.0)
        v = "(" + var + "+" + format_real(-t.shift.real()) + ")";
      else
        v = "(" + var + "-" + format_complex(t.shift) + ")";
    }
    std::string body = detail::render_kernel(t.kernel, v);
    Complex c = t.coeff;
    bool negative = false;
    if (c.imag() == 0.0 && c.real() < 0.0) {
      negative = true;
      c = -c;
    }
    std::string piece;
    if (c == Complex(1.0))
      piece = body;
    else
      piece = format_complex(c) + "*" + body;
    if (i == 0)
      out += negative ? "-" + piece : piece;
    else
      out += negative ? " - " + piece : " + " + piece;
  }
  return out;
}

}  // namespace fracdd
