#pragma once

/*
 * Fractional differintegral equations y^{(alpha)} = f(x, y) in Volterra form
 *   y(x) = sum_k y^{(a_k)}(0) x^{a_k} / Gamma(1 + a_k) + S_x^alpha f(x, y(x)),
 * with S^alpha taken from 0 (f is supported on x >= 0). Provides the symbolic
 * form, the Picard series sum_j S^{j alpha} f, an implicit product-rectangle
 * marching solver, a boundary-constant solver and a generic contraction
 * iteration on sampled functions.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "fracdd/rules.hpp"

namespace fracdd {

using Rhs = std::function<Complex(double, Complex)>;

struct InitialValue {
  double order;   // a_k >= 0
  Complex value;  // y^{(a_k)}(0)
};

struct FDEProblem {
  double alpha = 1.0;
  Rhs rhs;                      // f(x, y)
  std::optional<Expr> rhs_expr; // closed form of f when it does not depend on y
  std::vector<InitialValue> initial_data;
  double X = 1.0;
  double h = 1e-3;
  double lipschitz = 0.0;  // declared Lipschitz constant of f in y
};

struct VolterraForm {
  double alpha = 1.0;
  Expr initial_polynomial;  // sum_k value_k x^{a_k} / Gamma(1 + a_k)
  std::optional<Expr> rhs_expr;

  /// Closed-form solution, available when f does not depend on y.
  Expr solution() const {
    if (!rhs_expr) throw UnsupportedError("the right-hand side has no closed form");
    return initial_polynomial + differintegrate(*rhs_expr, alpha).expr;
  }
};

struct SeriesSolution {
  std::vector<Expr> terms;  // S^{j alpha} f, j = 0..J-1
  std::size_t truncation = 0;
  double tail_estimate = 0.0;

  Complex operator()(Complex z) const {
    Complex sum = 0.0;
    for (const Expr& t : terms) sum += evaluate_at(t, z);
    return sum;
  }
};

struct SampledSolution {
  std::vector<double> x;
  std::vector<Complex> y;
};

struct BoundaryCondition {
  double order;  // y^{(order)}(at) = value
  double at;
  Complex value;
};

struct BoundaryProblem {
  double alpha = 1.0;
  Rhs rhs;
  std::optional<Expr> rhs_expr;
  std::vector<BoundaryCondition> conditions;
  double X = 1.0;
  double h = 1e-3;
};

struct BoundarySolution {
  std::vector<Complex> constants;  // c_k multiplying x^{alpha - k}, k = 1..n
  SampledSolution samples;
  double residual = 0.0;
};

namespace detail {

inline void check_initial_data(const std::vector<InitialValue>& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i].order >= 0.0)) throw DomainError("initial-data orders must be non-negative");
    for (std::size_t j = 0; j < i; ++j)
      if (data[i].order == data[j].order) throw DomainError("initial-data orders must be distinct");
  }
}

inline Expr initial_polynomial(const std::vector<InitialValue>& data) {
  Expr p;
  for (const auto& d : data)
    p.terms.push_back(Term{d.value * special::reciprocal_gamma(1.0 + d.order), 0.0, Monomial{d.order}});
  return normalize(p);
}

inline std::vector<double> uniform_grid(double X, double h, double& step) {
  if (!(X > 0.0) || !(h > 0.0)) throw DomainError("the domain length and step must be positive");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(X / h)));
  step = X / double(n);
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = step * double(i);
  return x;
}

// Value with z^0 read as its limit 1 at the origin, where the kernel itself is undefined.
inline std::optional<Complex> right_limit(const Expr& e, double x) {
  if (x != 0.0) return evaluate(e, x);
  Complex sum = 0.0;
  for (const Term& t : e.terms) {
    const auto* m = std::get_if<Monomial>(&t.kernel);
    if (m && m->n == Complex{} && t.shift == Complex{}) {
      sum += t.coeff;
      continue;
    }
    const auto v = evaluate(Expr{{t}}, x);
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum;
}

inline Complex right_limit_at(const Expr& e, double x) {
  const auto v = right_limit(e, x);
  if (!v) throw SingularError("expression is singular at x = " + format_real(x));
  return *v;
}

inline double sup_norm(const std::vector<Complex>& v) {
  double m = 0.0;
  for (Complex z : v) m = std::max(m, std::abs(z));
  return m;
}

inline std::vector<Complex> difference(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace detail

/// Product-trapezoid S^alpha from 0 of samples on the uniform grid x_i = i h.
inline std::vector<Complex> fractional_integral_on_grid(double alpha, double h, const std::vector<Complex>& u) {
  if (!(alpha > 0.0)) throw DomainError("integration order must be positive");
  const std::size_t n = u.size();
  std::vector<double> p(n + 1);
  for (std::size_t m = 0; m <= n; ++m) p[m] = std::pow(double(m), alpha + 1.0);
  const double scale = std::pow(h, alpha) / std::tgamma(alpha + 2.0);
  std::vector<Complex> out(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    Complex s = (p[i - 1] - (double(i) - 1.0 - alpha) * std::pow(double(i), alpha)) * u[0] + u[i];
    for (std::size_t j = 1; j < i; ++j) s += (p[i - j + 1] + p[i - j - 1] - 2.0 * p[i - j]) * u[j];
    out[i] = scale * s;
  }
  return out;
}

/// The fixed-point functional of the problem.
inline VolterraForm volterra_form(const FDEProblem& p) {
  if (!(p.alpha > 0.0)) throw DomainError("equation order must be positive");
  detail::check_initial_data(p.initial_data);
  return VolterraForm{p.alpha, detail::initial_polynomial(p.initial_data), p.rhs_expr};
}

/// u = sum_{j<J} S^{j alpha} f. The tail estimate is the largest |S^{(J-1) alpha} f|
/// over the samples where it is finite.
inline SeriesSolution picard_series(const Expr& f, double alpha, std::size_t J,
                                    const std::vector<double>& samples = {0.0, 0.25, 0.5, 0.75, 1.0}) {
  if (!(alpha > 0.0)) throw DomainError("series order must be positive");
  if (J == 0) throw DomainError("the series needs at least one term");
  SeriesSolution out;
  out.truncation = J;
  for (std::size_t j = 0; j < J; ++j) out.terms.push_back(differintegrate(f, double(j) * alpha).expr);
  for (double z : samples)
    if (auto v = evaluate(out.terms.back(), z)) out.tail_estimate = std::max(out.tail_estimate, std::abs(*v));
  return out;
}

/// Implicit product-rectangle marching on x_i = i h:
///   y_{i+1} = P(x_{i+1}) + 1/Gamma(alpha) sum_{j<=i} w_{ij} f(x_{j+1}, y_{j+1}),
///   w_{ij} = ((x_{i+1} - x_j)^alpha - (x_{i+1} - x_{j+1})^alpha) / alpha,
/// each step solved by fixed-point iteration to 1e-10.
inline SampledSolution solve_fde(const FDEProblem& p) {
  const VolterraForm form = volterra_form(p);
  if (!p.rhs) throw DomainError("the problem needs a right-hand side");
  double h = 0.0;
  SampledSolution s;
  s.x = detail::uniform_grid(p.X, p.h, h);
  const double q = p.lipschitz * std::pow(h, p.alpha) / std::tgamma(1.0 + p.alpha);
  if (q >= 1.0)
    throw ContractionError("step too large: L h^alpha / Gamma(1 + alpha) = " + format_real(q) + " >= 1", q);
  const std::size_t n = s.x.size();
  std::vector<double> b(n);
  for (std::size_t m = 0; m < n; ++m) b[m] = std::pow(double(m + 1), p.alpha) - std::pow(double(m), p.alpha);
  const double scale = std::pow(h, p.alpha) / std::tgamma(1.0 + p.alpha);
  std::vector<Complex> F(n, 0.0);
  s.y.assign(n, 0.0);
  const auto y0 = detail::right_limit(form.initial_polynomial, 0.0);
  if (!y0) throw SingularError("initial data are singular at 0");
  s.y[0] = *y0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double x = s.x[i + 1];
    Complex history = 0.0;
    for (std::size_t j = 0; j < i; ++j) history += b[i - j] * F[j + 1];
    const Complex base = evaluate_at(form.initial_polynomial, x) + scale * history;
    Complex y = s.y[i];
    double last = 0.0, previous = 0.0;
    bool done = false;
    for (int it = 0; it < 500 && !done; ++it) {
      const Complex next = base + scale * b[0] * p.rhs(x, y);
      previous = last;
      last = std::abs(next - y);
      if (!std::isfinite(last)) throw DomainError("solution is not finite at x = " + format_real(x));
      done = last <= 1e-10 * std::max(1.0, std::abs(next));
      y = next;
    }
    if (!done) throw NonConvergenceError("step at x = " + format_real(x) + " did not converge", last, previous);
    s.y[i + 1] = y;
    F[i + 1] = p.rhs(x, y);
  }
  return s;
}

/// y(x) = sum_k c_k x^{alpha - k} + S^alpha f(x, y(x)) with the c_k fixed by
/// the boundary conditions. A y-dependent f is handled by an outer
/// fixed-point iteration on the grid (conditions of order 0 only), damped by
/// 0.5 whenever the update grows. Samples where a basis term is singular are NaN.
inline BoundarySolution solve_boundary(const BoundaryProblem& p) {
  if (!(p.alpha > 0.0)) throw DomainError("equation order must be positive");
  const std::size_t n = p.conditions.size();
  if (n == 0) throw DomainError("at least one boundary condition is required");
  std::vector<Expr> basis;
  for (std::size_t k = 1; k <= n; ++k) basis.push_back(Expr::of(Monomial{p.alpha - double(k)}));

  Eigen::MatrixXcd A(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const BoundaryCondition& c = p.conditions[r];
      A(r, k) = detail::right_limit_at(differintegrate(basis[k], -c.order).expr, c.at);
    }
  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
  if (!lu.isInvertible()) throw SingularError("the boundary collocation system is singular");

  double h = 0.0;
  BoundarySolution out;
  out.samples.x = detail::uniform_grid(p.X, p.h, h);
  const std::vector<double>& x = out.samples.x;
  auto basis_on_grid = [&](const Eigen::VectorXcd& c) {
    std::vector<Complex> y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (c(k) != Complex{}) {
          const auto v = detail::right_limit(basis[k], x[i]);
          y[i] += v ? c(k) * *v : Complex(NAN, NAN);
        }
    return y;
  };
  auto solve_constants = [&](const std::function<Complex(const BoundaryCondition&)>& particular) {
    Eigen::VectorXcd rhs(n);
    for (std::size_t r = 0; r < n; ++r) rhs(r) = p.conditions[r].value - particular(p.conditions[r]);
    return Eigen::VectorXcd(lu.solve(rhs));
  };
  auto finish = [&](const Eigen::VectorXcd& c, const std::function<Complex(const BoundaryCondition&)>& particular) {
    out.constants.assign(c.data(), c.data() + n);
    out.residual = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      Complex v = particular(p.conditions[r]);
      for (std::size_t k = 0; k < n; ++k) v += c(k) * A(r, k);
      out.residual = std::max(out.residual, std::abs(v - p.conditions[r].value));
    }
  };

  if (p.rhs_expr) {
    const Expr g = differintegrate(*p.rhs_expr, p.alpha).expr;
    auto particular = [&](const BoundaryCondition& c) {
      return detail::right_limit_at(differintegrate(g, -c.order).expr, c.at);
    };
    const Eigen::VectorXcd c = solve_constants(particular);
    out.samples.y = basis_on_grid(c);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (auto v = detail::right_limit(g, x[i])) out.samples.y[i] += *v;
    finish(c, particular);
    return out;
  }

  if (!p.rhs) throw DomainError("the problem needs a right-hand side");
  for (const auto& c : p.conditions) {
    if (c.order != 0.0) throw UnsupportedError("a y-dependent right-hand side supports order-0 conditions only");
    if (c.at < 0.0 || c.at > x.back()) throw DomainError("boundary point outside the domain");
  }
  auto interpolate = [&](const std::vector<Complex>& v, double at) {
    const double u = at / h;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), x.size() - 2);
    const double t = u - double(i);
    return (1.0 - t) * v[i] + t * v[i + 1];
  };

  for (std::size_t k = 0; k < n; ++k)
    if (!detail::right_limit(basis[k], 0.0))
      throw DomainError("basis term x^" + format_real(p.alpha - double(k + 1)) +
                        " is singular at 0; a y-dependent right-hand side cannot be sampled there");
  std::vector<Complex> g(x.size(), 0.0), y;
  double damping = 1.0, prev_change = INFINITY;
  for (int it = 0; it < 500; ++it) {
    auto particular = [&](const BoundaryCondition& c) { return interpolate(g, c.at); };
    const Eigen::VectorXcd c = solve_constants(particular);
    std::vector<Complex> next = basis_on_grid(c);
    for (std::size_t i = 0; i < x.size(); ++i) next[i] += g[i];
    if (!y.empty()) {
      const double change = detail::sup_norm(detail::difference(next, y));
      if (!std::isfinite(change)) throw DomainError("boundary iteration produced non-finite values");
      if (change > prev_change) damping *= 0.5;
      for (std::size_t i = 0; i < x.size(); ++i) next[i] = y[i] + damping * (next[i] - y[i]);
      if (change <= 1e-10 * std::max(1.0, detail::sup_norm(next))) {
        out.samples.y = next;
        finish(c, particular);
        return out;
      }
      if (damping < 1e-6)
        throw NonConvergenceError("boundary iteration diverged", change, prev_change);
      prev_change = change;
    }
    y = std::move(next);
    std::vector<Complex> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f[i] = p.rhs(x[i], y[i]);
    g = fractional_integral_on_grid(p.alpha, h, f);
  }
  throw NonConvergenceError("boundary iteration did not converge in 500 rounds", prev_change, prev_change);
}

/// Partial sums of sum_j T^j b, stopping when a term falls below 1e-10 in
/// sup-norm. T must pass an empirical contraction test on two probe pairs.
inline std::vector<Complex> contraction_fixed_point(
    const std::function<std::vector<Complex>(const std::vector<Complex>&)>& T, const std::vector<Complex>& b,
    std::size_t J) {
  const std::vector<Complex> zero(b.size(), 0.0);
  std::vector<Complex> ones(b.size(), 1.0);
  const std::vector<Complex> t0 = T(zero);
  for (const auto& probe : {b, ones}) {
    const double d = detail::sup_norm(probe);
    if (d == 0.0) continue;
    const double ratio = detail::sup_norm(detail::difference(T(probe), t0)) / d;
    if (!(ratio < 1.0)) throw ContractionError("operator is not a contraction: measured ratio " + format_real(ratio), ratio);
  }
  std::vector<Complex> sum = b, term = b;
  double last = detail::sup_norm(term), previous = last;
  for (std::size_t j = 1; j < J; ++j) {
    if (last < 1e-10) return sum;
    term = T(term);
    previous = last;
    last = detail::sup_norm(term);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
  }
  if (last < 1e-10) return sum;
  throw NonConvergenceError("series tail " + format_real(last) + " above tolerance after " + std::to_string(J) +
                                " terms",
                            last, previous);
}

}  // namespace fracdd
