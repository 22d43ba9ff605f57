#pragma once

/*
 * Closed-form differintegration S^alpha over the kernel classes of expr.hpp.
 *
 * Sign convention: alpha > 0 integrates, alpha < 0 differentiates, so the
 * derivative of order a is S^{-a}. The lower bound is -infinity throughout;
 * finite lower bounds are reconciled through the complimentary series.
 */

#include <string>
#include <vector>

#include "fracdd/expr.hpp"

namespace fracdd {

enum class Rule {
  Monomial,
  ZeroFunction,
  Delta,
  Heaviside,
  HeavisideMonomial,
  Exponential,
  Trigonometric,
  TrigonometricViaExponentials,
  Logarithm,
  LogMonomial,
  Bose,
  Polylog,
  MonomialExponential,
  Kummer,
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Monomial: return "monomial";
    case Rule::ZeroFunction: return "zero-function";
    case Rule::Delta: return "delta";
    case Rule::Heaviside: return "heaviside";
    case Rule::HeavisideMonomial: return "heaviside-monomial";
    case Rule::Exponential: return "exponential";
    case Rule::Trigonometric: return "trigonometric";
    case Rule::TrigonometricViaExponentials: return "trigonometric-via-exponentials";
    case Rule::Logarithm: return "logarithm";
    case Rule::LogMonomial: return "log-monomial";
    case Rule::Bose: return "bose-polylog";
    case Rule::Polylog: return "polylog";
    case Rule::MonomialExponential: return "monomial-exponential-kummer";
    case Rule::Kummer: return "kummer";
  }
  return "?";
}

struct RuleResult {
  Expr expr;                              // normalized
  std::vector<Rule> rule_applied;         // one per input term
  std::vector<std::string> branch_notes;  // principal-branch powers taken
  std::string text;                       // result with symbolic power factors kept
};

namespace detail {

struct TermImage {
  std::vector<Term> terms;
  std::string factor;  // symbolic factor shown in place of the numeric coefficient ratio
};

inline std::string power_text(Complex base, Complex exponent) {
  if (special::is_integer(exponent, 0.0)) return format_complex(special::cpow(base, exponent));
  return atom(base) + "^" + atom(exponent);
}

inline void note_branch(std::vector<std::string>& notes, Complex base, Complex exponent) {
  if (base.imag() == 0.0 && base.real() > 0.0) return;
  if (special::is_integer(exponent, 0.0)) return;
  notes.push_back(format_complex(base) + "^" + atom(exponent) + " on the principal branch (arg = " +
                  format_real(std::arg(base)) + ")");
}

inline TermImage apply_rule(const Term& t, Complex a, Rule& rule, std::vector<std::string>& notes) {
  using special::gamma;
  using special::reciprocal_gamma;
  const Complex c = t.coeff, s = t.shift;
  auto one = [&](Complex coeff, Kernel k) { return TermImage{{Term{coeff, s, std::move(k)}}, {}}; };

  return std::visit(
      [&](const auto& v) -> TermImage {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Monomial>) {
          rule = Rule::Monomial;
          const Complex top = 1.0 + v.n + a;
          if (special::is_nonpositive_integer(top, 1e-12))
            return one(c * gamma(1.0 + v.n), ZeroFn{-top});
          return one(c * gamma(1.0 + v.n) * reciprocal_gamma(top), Monomial{v.n + a});
        } else if constexpr (std::is_same_v<T, ZeroFn>) {
          rule = Rule::ZeroFunction;
          return one(c, ZeroFn{v.order - a});
        } else if constexpr (std::is_same_v<T, DeltaDeriv>) {
          rule = Rule::Delta;
          return one(c, HeavisideMonomial{a - 1.0 - v.order});
        } else if constexpr (std::is_same_v<T, Heaviside>) {
          rule = Rule::Heaviside;
          return one(c, HeavisideMonomial{a});
        } else if constexpr (std::is_same_v<T, HeavisideMonomial>) {
          rule = Rule::HeavisideMonomial;
          return one(c, HeavisideMonomial{v.power + a});
        } else if constexpr (std::is_same_v<T, Exponential>) {
          rule = Rule::Exponential;
          note_branch(notes, v.rate, -a);
          TermImage img = one(c * special::cpow(v.rate, -a), v);
          if (a != Complex{} && v.rate != Complex(1.0)) img.factor = power_text(v.rate, -a);
          return img;
        } else if constexpr (std::is_same_v<T, Sin> || std::is_same_v<T, Cos>) {
          if (v.rate.imag() == 0.0 && v.rate.real() > 0.0) {
            rule = Rule::Trigonometric;
            T out = v;
            out.phase = v.phase - a * (kPi / 2.0);
            TermImage img = one(c * special::cpow(v.rate, -a), out);
            if (a != Complex{} && v.rate != Complex(1.0)) img.factor = power_text(v.rate, -a);
            return img;
          }
          rule = Rule::TrigonometricViaExponentials;
          if (a == Complex{}) return one(c, v);
          TermImage img;
          for (const Term& e : trig_to_exponentials(t).terms) {
            const Complex lam = std::get<Exponential>(e.kernel).rate;
            note_branch(notes, lam, -a);
            img.terms.push_back(Term{e.coeff * special::cpow(lam, -a), s, e.kernel});
          }
          return img;
        } else if constexpr (std::is_same_v<T, Log>) {
          rule = Rule::Logarithm;
          return one(c, LogMonomial{a, v.scale});
        } else if constexpr (std::is_same_v<T, LogMonomial>) {
          rule = Rule::LogMonomial;
          return one(c, LogMonomial{v.order + a, v.scale});
        } else if constexpr (std::is_same_v<T, BoseKernel>) {
          rule = Rule::Bose;
          return one(c, PolylogExp{a});
        } else if constexpr (std::is_same_v<T, PolylogExp>) {
          rule = Rule::Polylog;
          return one(c, PolylogExp{v.s + a});
        } else if constexpr (std::is_same_v<T, MonomialExp>) {
          rule = Rule::MonomialExponential;
          note_branch(notes, v.rate, -v.n - a);
          return one(c, KummerPair{v.n, v.rate, a});
        } else if constexpr (std::is_same_v<T, KummerPair>) {
          rule = Rule::Kummer;
          note_branch(notes, v.rate, -v.n - v.order - a);
          return one(c, KummerPair{v.n, v.rate, v.order + a});
        }
      },
      t.kernel);
}

inline std::string image_text(const TermImage& img, const Term& input) {
  std::string out;
  for (const Term& r : img.terms) {
    if (r.coeff == Complex{}) continue;
    std::string piece;
    if (!img.factor.empty()) {
      std::string lead = input.coeff == Complex(1.0) ? "" : format_complex(input.coeff) + " * ";
      piece = lead + img.factor + " * " + to_string(Expr{{Term{1.0, r.shift, r.kernel}}});
    } else {
      piece = to_string(Expr{{r}});
    }
    if (!out.empty()) out += " + ";
    out += piece;
  }
  return out;
}

}  // namespace detail

struct RuleOptions {
  // Multiply the delta and Heaviside images by the distributional phase e^{-i pi alpha}.
  bool distribution_phase = false;
};

/// S^alpha e, term by term.
inline RuleResult differintegrate(const Expr& e, Complex alpha, const RuleOptions& options = {}) {
  RuleResult result;
  const Expr input = normalize(e);
  Expr raw;
  std::string text;
  for (const Term& t : input.terms) {
    Rule rule{};
    detail::TermImage img = detail::apply_rule(t, alpha, rule, result.branch_notes);
    if (options.distribution_phase &&
        (rule == Rule::Delta || rule == Rule::Heaviside || rule == Rule::HeavisideMonomial)) {
      const Complex phase = std::exp(Complex(0.0, -kPi) * alpha);
      for (Term& r : img.terms) r.coeff *= phase;
    }
    result.rule_applied.push_back(rule);
    for (const Term& r : img.terms) raw.terms.push_back(r);
    const std::string piece = detail::image_text(img, t);
    if (piece.empty()) continue;
    if (!text.empty()) text += " + ";
    text += piece;
  }
  result.expr = normalize(raw);
  result.text = text.empty() ? "0" : text;
  return result;
}

/// Zero function of the given order: z^{-1-order} / Gamma(-order).
inline Complex zero_function_value(Complex order, Complex z) {
  if (z == Complex{}) {
    const Complex p = -1.0 - order;
    if (p.real() > 0.0) return 0.0;
    if (p == Complex{}) return special::reciprocal_gamma(-order);
    throw SingularError("zero function of order " + format_complex(order) + " is singular at 0");
  }
  const Complex rg = special::reciprocal_gamma(-order);
  if (rg == Complex{}) return 0.0;
  return special::cpow(z, -1.0 - order) * rg;
}

struct ComplimentarySeries {
  Complex x0{};
  std::vector<Complex> coefficients;
  Complex order_offset{};

  /// psi_c(x) = sum_k c_k zero^{(k + order_offset)}(x - x0)
  Complex operator()(Complex x) const {
    Complex sum = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k)
      sum += coefficients[k] * zero_function_value(double(k) + order_offset, x - x0);
    return sum;
  }
};

/// c_k = (S^{k+1} f)(x0), k = 0..K-1: the Taylor data of the canonical
/// integrals at the finite lower bound x0.
inline ComplimentarySeries complimentary_coefficients(const Expr& f, Complex x0, std::size_t K) {
  ComplimentarySeries series;
  series.x0 = x0;
  for (std::size_t k = 0; k < K; ++k) {
    const Expr sk = differintegrate(f, double(k + 1)).expr;
    const auto v = evaluate(sk, x0);
    if (!v)
      throw SingularError("S^" + std::to_string(k + 1) + " f is singular at x0 = " + format_complex(x0) +
                          " (k = " + std::to_string(k) + ")");
    series.coefficients.push_back(*v);
  }
  return series;
}

/// Derivative of order alpha with lower bound x0, as S^{-alpha} f minus the
/// complimentary series truncated at K terms.
inline Expr reconstruct_with_complimentary(const Expr& f, Complex x0, Complex alpha, std::size_t K) {
  Expr out = differintegrate(f, -alpha).expr;
  if (K == 0) return out;
  const ComplimentarySeries c = complimentary_coefficients(f, x0, K);
  for (std::size_t k = 0; k < K; ++k)
    out.terms.push_back(Term{-c.coefficients[k], x0, ZeroFn{double(k) + alpha}});
  return normalize(out);
}

}  // namespace fracdd
