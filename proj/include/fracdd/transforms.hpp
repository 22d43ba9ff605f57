#pragma once

/*
 * Fractional Laplace and differintegral Fourier transforms.
 *
 * Fractional Laplace:
 *   L^a[f](s) = e^{-i pi a} (e^{ts} S_t^a f(t) e^{-st}) at t = (1 - a) s,
 * where S_t^a acts with the lower bound at +infinity (the direction in which
 * f(t) e^{-st} decays). With that bound e^{-i pi a} S^a is the right-sided
 * Weyl integral W^a g(t) = 1/Gamma(a) int_t^inf g(u) (u - t)^{a-1} du, so
 *   L^a[f](s) = e^{ts} W^a[f e^{-s.}](t),  t = (1 - a) s,
 * giving f(s) at a = 0 and the classical transform at a = 1.
 *
 * Differintegral Fourier: the four-term sum with the canonical S^a (lower
 * bound -infinity). At a = 1 it is (2 pi)^{-1/2} int f(t) e^{-i w t} dt; at
 * a = 0 it is the even part (f(w) + f(-w)) / 2.
 */

#include <optional>
#include <vector>

#include "fracdd/quadrature.hpp"
#include "fracdd/rules.hpp"

namespace fracdd {

enum class Engine { Symbolic, Numeric };

struct TransformRequest {
  std::optional<Expr> expr;     // symbolic form of f, when available
  RealFunction function;        // numeric form of f (required for the numeric engine)
  double alpha = 1.0;           // 0 <= alpha <= 1
  std::vector<Complex> points;  // s or omega
  Engine engine = Engine::Symbolic;
  QuadratureSpec spec;
};

struct TransformSample {
  Complex point;
  Complex value;
  double error_estimate = 0.0;
};

namespace detail {

// f term as c * tau^m e^{mu tau} (optionally times H(tau)), about its shift.
struct MonomialExpPiece {
  Complex coeff;
  Complex shift;
  Complex m;
  Complex mu;
  bool heaviside = false;
};

inline std::vector<MonomialExpPiece> monomial_exp_pieces(const Expr& f) {
  std::vector<MonomialExpPiece> out;
  for (const Term& t : normalize(f).terms) {
    const Complex c = t.coeff, s = t.shift;
    if (const auto* v = std::get_if<Monomial>(&t.kernel)) {
      out.push_back({c, s, v->n, 0.0});
    } else if (const auto* z = std::get_if<ZeroFn>(&t.kernel)) {
      if (detail::is_nonnegative_integer(z->order))
        throw UnsupportedError("integer-order zero functions have no symbolic transform here");
      out.push_back({c * special::reciprocal_gamma(-z->order), s, -1.0 - z->order, 0.0});
    } else if (const auto* e = std::get_if<Exponential>(&t.kernel)) {
      out.push_back({c, s, 0.0, e->rate});
    } else if (const auto* me = std::get_if<MonomialExp>(&t.kernel)) {
      out.push_back({c, s, me->n, me->rate});
    } else if (std::holds_alternative<Heaviside>(t.kernel)) {
      out.push_back({c, s, 0.0, 0.0, true});
    } else if (const auto* hm = std::get_if<HeavisideMonomial>(&t.kernel)) {
      out.push_back({c * special::reciprocal_gamma(1.0 + hm->power), s, hm->power, 0.0, true});
    } else if (std::holds_alternative<Sin>(t.kernel) || std::holds_alternative<Cos>(t.kernel)) {
      for (const Term& e : trig_to_exponentials(t).terms)
        out.push_back({e.coeff, s, 0.0, std::get<Exponential>(e.kernel).rate});
    } else {
      throw UnsupportedError(std::string("no symbolic transform for ") + kernel_name(t.kernel) +
                             " terms; use the numeric engine");
    }
  }
  return out;
}

// W^a[tau^m e^{k tau}](t), analytically continued in m and k.
inline Complex weyl_monomial_exp(Complex m, Complex k, Complex a, Complex t) {
  if (a == Complex{}) return special::cpow(t, m) * std::exp(k * t);
  if (k == Complex{}) throw UnsupportedError("W^a of a bare power diverges; the transform needs a decaying factor");
  if (t == Complex{}) {
    if (special::is_nonpositive_integer(m + a, 1e-12))
      throw PoleError("transform has a pole: Gamma(m + a) at m + a = " + format_complex(m + a));
    return special::gamma(m + a) * special::reciprocal_gamma(a) * special::cpow(-k, -m - a);
  }
  return std::exp(k * t) * special::cpow(t, m + a) * special::tricomi_u(a, m + a + 1.0, -k * t);
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("transform order must satisfy 0 <= alpha <= 1");
}

}  // namespace detail

/// Fractional Laplace transform of a closed-form f at one point s.
inline Complex laplace_frac(const Expr& f, double alpha, Complex s) {
  detail::check_alpha(alpha);
  if (alpha == 0.0) return evaluate_at(f, s);
  const Complex t = (1.0 - alpha) * s;
  Complex sum = 0.0;
  for (const auto& p : detail::monomial_exp_pieces(f)) {
    // g(tau - a) e^{-s tau} = e^{-s a} (tau - a)^m e^{(mu - s)(tau - a)}
    const Complex local = t - p.shift;
    if (p.heaviside && local.real() < 0.0)
      throw UnsupportedError("Heaviside support starts after the evaluation point; use the numeric engine");
    sum += p.coeff * std::exp(-s * p.shift) * detail::weyl_monomial_exp(p.m, p.mu - s, alpha, local);
  }
  return std::exp(t * s) * sum;
}

/// Fractional Laplace transform by quadrature of the right-sided integral (real s).
inline NumericResult laplace_frac_numeric(const RealFunction& f, double alpha, double s,
                                          const QuadratureSpec& spec = {}) {
  detail::check_alpha(alpha);
  if (alpha == 0.0) return NumericResult{f(s), 0.0, {}};
  const double t = (1.0 - alpha) * s;
  // W^a g(t) = S^a[g(-.)](-t) with the canonical lower bound
  QuadratureSpec mirrored = spec;
  mirrored.lower_bound.reset();
  mirrored.breakpoints.clear();
  for (double b : spec.breakpoints) mirrored.breakpoints.push_back(-b);
  const RealFunction g = [&](double u) { return f(-u) * std::exp(s * u); };
  NumericResult r = differint_numeric(g, alpha, -t, mirrored);
  const double scale = std::exp(t * s);
  r.value *= scale;
  r.error_estimate *= scale;
  return r;
}

/// Differintegral Fourier transform of a closed-form f at one point omega.
inline Complex fourier_differint(const Expr& f, double alpha, Complex omega) {
  detail::check_alpha(alpha);
  const Complex I(0.0, 1.0);
  const Complex w = std::pow(2.0 / kPi, alpha / 2.0) / 4.0;
  const Expr fr = normalize(f);
  Expr fm;  // f(-t)
  for (const Term& t : fr.terms) {
    Term r = t;
    r.shift = -t.shift;
    std::visit(
        [&](auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Exponential>) {
            v.rate = -v.rate;
          } else if constexpr (std::is_same_v<T, Sin> || std::is_same_v<T, Cos>) {
            v.rate = -v.rate;
          } else if constexpr (std::is_same_v<T, MonomialExp>) {
            if (!special::is_integer(v.n, 0.0)) throw UnsupportedError("reflection of a non-integer power");
            r.coeff *= (std::lround(v.n.real()) % 2) ? -1.0 : 1.0;
            v.rate = -v.rate;
          } else if constexpr (std::is_same_v<T, Monomial>) {
            if (!special::is_integer(v.n, 0.0)) throw UnsupportedError("reflection of a non-integer power");
            r.coeff *= (std::lround(v.n.real()) % 2) ? -1.0 : 1.0;
          } else {
            throw UnsupportedError(std::string("no symbolic Fourier rule for ") + kernel_name(r.kernel) +
                                   " terms; use the numeric engine");
          }
        },
        r.kernel);
    fm.terms.push_back(r);
  }
  const Expr a1 = differintegrate(multiply(fr, Expr::of(Exponential{-I * omega})), alpha).expr;
  const Expr a2 = differintegrate(multiply(normalize(fm), Expr::of(Exponential{I * omega})), alpha).expr;
  const Complex tp = (1.0 - alpha) * omega, tm = (alpha - 1.0) * omega;
  const Complex sum = std::exp(I * omega * tp) * evaluate_at(a1, tp) + std::exp(-I * omega * tp) * evaluate_at(a2, tp) +
                      std::exp(I * omega * tm) * evaluate_at(a1, tm) + std::exp(-I * omega * tm) * evaluate_at(a2, tm);
  return w * sum;
}

/// Differintegral Fourier transform by quadrature (real omega).
inline NumericResult fourier_differint_numeric(const RealFunction& f, double alpha, double omega,
                                               const QuadratureSpec& spec = {}) {
  detail::check_alpha(alpha);
  const Complex I(0.0, 1.0);
  const double w = std::pow(2.0 / kPi, alpha / 2.0) / 4.0;
  QuadratureSpec canon = spec;
  canon.lower_bound.reset();
  std::vector<double> mirrored_breaks;
  for (double b : spec.breakpoints) mirrored_breaks.push_back(-b);
  const RealFunction g1 = [&](double u) { return f(u) * std::exp(-I * omega * u); };
  const RealFunction g2 = [&](double u) { return f(-u) * std::exp(I * omega * u); };
  auto S = [&](const RealFunction& g, double t, bool mirrored) -> NumericResult {
    if (alpha == 0.0) return NumericResult{g(t), 0.0, {}};
    QuadratureSpec sp = canon;
    if (mirrored) sp.breakpoints = mirrored_breaks;
    return differint_numeric(g, alpha, t, sp);
  };
  const double tp = (1.0 - alpha) * omega, tm = (alpha - 1.0) * omega;
  const NumericResult r1 = S(g1, tp, false), r2 = S(g2, tp, true), r3 = S(g1, tm, false), r4 = S(g2, tm, true);
  NumericResult out;
  out.value = w * (std::exp(I * omega * tp) * r1.value + std::exp(-I * omega * tp) * r2.value +
                   std::exp(I * omega * tm) * r3.value + std::exp(-I * omega * tm) * r4.value);
  out.error_estimate = w * (r1.error_estimate + r2.error_estimate + r3.error_estimate + r4.error_estimate);
  return out;
}

/// Classical Laplace transform of a closed-form f over (0, inf).
inline Complex laplace_classical(const Expr& f, Complex s) {
  Complex sum = 0.0;
  for (const Term& t : normalize(f).terms) {
    if (const auto* d = std::get_if<DeltaDeriv>(&t.kernel)) {
      if (t.shift.real() < 0.0) continue;
      sum += t.coeff * std::exp(-s * t.shift) * special::cpow(s, d->order);
      continue;
    }
    for (const auto& p : detail::monomial_exp_pieces(Expr{{t}})) {
      if (p.shift != Complex{} && !p.heaviside)
        throw UnsupportedError("classical Laplace of a shifted non-causal term");
      if (p.shift.real() < 0.0) throw UnsupportedError("Heaviside shift must be non-negative");
      if (special::is_nonpositive_integer(1.0 + p.m, 1e-12))
        throw PoleError("Laplace transform of tau^m with m a negative integer");
      sum += p.coeff * std::exp(-s * p.shift) * special::gamma(1.0 + p.m) * special::cpow(s - p.mu, -1.0 - p.m);
    }
  }
  return sum;
}

/// L[S^alpha f](s) = s^{-alpha} L[f](s).
inline Complex laplace_of_differint(const Expr& f, Complex alpha, Complex s) {
  return special::cpow(s, -alpha) * laplace_classical(f, s);
}

/// As above with the classical transform computed by quadrature (real s).
inline NumericResult laplace_of_differint_numeric(const RealFunction& f, Complex alpha, double s,
                                                  const QuadratureSpec& spec = {}) {
  NumericResult r = laplace_frac_numeric(f, 1.0, s, spec);
  const Complex k = special::cpow(s, -alpha);
  r.value *= k;
  r.error_estimate *= std::abs(k);
  return r;
}

/// Batch evaluation over req.points with the requested engine.
inline std::vector<TransformSample> laplace_frac(const TransformRequest& req) {
  std::vector<TransformSample> out;
  for (Complex s : req.points) {
    if (req.engine == Engine::Symbolic) {
      if (!req.expr) throw UnsupportedError("symbolic engine needs a closed-form expression");
      out.push_back({s, laplace_frac(*req.expr, req.alpha, s), 0.0});
    } else {
      if (s.imag() != 0.0) throw DomainError("numeric fractional Laplace needs real s");
      const RealFunction f = req.function ? req.function : as_function(*req.expr);
      const NumericResult r = laplace_frac_numeric(f, req.alpha, s.real(), req.spec);
      out.push_back({s, r.value, r.error_estimate});
    }
  }
  return out;
}

inline std::vector<TransformSample> fourier_differint(const TransformRequest& req) {
  std::vector<TransformSample> out;
  for (Complex w : req.points) {
    if (req.engine == Engine::Symbolic) {
      if (!req.expr) throw UnsupportedError("symbolic engine needs a closed-form expression");
      out.push_back({w, fourier_differint(*req.expr, req.alpha, w), 0.0});
    } else {
      if (w.imag() != 0.0) throw DomainError("numeric Fourier transform needs real omega");
      const RealFunction f = req.function ? req.function : as_function(*req.expr);
      const NumericResult r = fourier_differint_numeric(f, req.alpha, w.real(), req.spec);
      out.push_back({w, r.value, r.error_estimate});
    }
  }
  return out;
}

}  // namespace fracdd
