#pragma once

/*
 * Numeric differintegration by direct quadrature of
 *   S^alpha f(x) = 1/Gamma(alpha) int_c^x f(t) (x - t)^{alpha - 1} dt
 * with a finite lower bound c or c = -infinity (truncated to a window).
 *
 * The interval is split at breakpoints and each segment is graded
 * geometrically toward both of its ends. Panels touching a weakly singular
 * end use Gauss-Jacobi nodes for the real part of the exponent; all others
 * use Gauss-Legendre. Node counts double until two successive estimates agree.
 */

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracdd/expr.hpp"
#include "fracdd/rules.hpp"

namespace fracdd {

using RealFunction = std::function<Complex(double)>;
/// f^{(order)}(t)
using DerivativeFunction = std::function<Complex(int order, double t)>;

struct QuadratureSpec {
  int node_count = 64;                    // Gauss nodes per panel (first pass)
  double tolerance = 1e-8;                // agreement of successive refinements
  std::optional<double> lower_bound;      // nullopt means -infinity
  double window = 60.0;                   // W: [x - W, x] replaces (-inf, x]
  int lift_order = 0;                     // m for the integer lift; 0 picks the smallest valid
  std::vector<double> breakpoints{0.0};   // points where f may be non-smooth
  bool rl_boundary_terms = false;         // add sum_j f^{(j)}(c+) (x-c)^{alpha+j}/Gamma(alpha+j+1)
  int max_node_count = 4096;
};

struct NumericResult {
  Complex value{};
  double error_estimate = 0.0;
  std::vector<std::string> warnings;
};

namespace detail {

struct Rule1D {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline Rule1D gauss_legendre_nodes(int n) {
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  return r;
}

// Golub-Welsch for the weight (1 - t)^a (1 + t)^b on [-1, 1].
inline Rule1D gauss_jacobi_nodes(int n, double a, double b) {
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double beta;
    if (k == 1)
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    else
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(beta);
  }
  Rule1D r;
  if (n == 1) {
    r.nodes = {diag(0)};
  }
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(a + b + 2.0));
  if (n == 1) {
    r.weights = {mu0};
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v * v;
  }
  return r;
}

inline const Rule1D& legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre_nodes(n)).first;
  return it->second;
}

// Weight (1 + t)^b.
inline const Rule1D& jacobi(int n, double b) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(n, b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, gauss_jacobi_nodes(n, 0.0, b)).first;
  return it->second;
}

inline constexpr double kGrading = 0.1;
inline constexpr int kJacobiNodeCap = 256;

// Levels of geometric grading toward an end carrying |.|^{e - 1}: enough that
// the innermost panel (relative size r^K) holds less than tol/100 of the mass.
inline int grading_levels(Complex e, double tol) {
  int k = 12;
  if (e.imag() != 0.0) {
    const double need = std::log(std::max(tol, 1e-16) * 1e-2) / (std::max(e.real(), 1e-3) * std::log(kGrading));
    k = std::max(k, int(std::ceil(need)));
  }
  return std::min(k, 2000);
}

struct WeightedProblem {
  RealFunction f;          // integrand factor, as a function of t
  double x = 0.0;          // upper end (u = x - t)
  double length = 0.0;     // L = x - c
  Complex a = 1.0;         // u^{a-1}
  Complex b = 1.0;         // v^{b-1}, v = t - c
  std::vector<double> breakpoints;  // interior t-values
  double tol = 1e-8;
};

inline Complex real_power(double base, Complex e) {
  if (e == Complex{}) return 1.0;
  return std::exp(e * std::log(base));
}

inline void check_finite(Complex v, double t) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw DomainError("integrand is not finite at t = " + format_real(t));
}

// int_c^x f(t) u^{a-1} v^{b-1} dt with n nodes per Legendre panel.
inline Complex weighted_integral(const WeightedProblem& p, int n) {
  const double c = p.x - p.length;
  std::vector<double> ends{c};
  for (double bp : p.breakpoints)
    if (bp > c + 1e-14 * p.length && bp < p.x - 1e-14 * p.length) ends.push_back(bp);
  ends.push_back(p.x);
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

  const int k_upper = grading_levels(p.a, p.tol);
  const int k_lower = grading_levels(p.b, p.tol);
  const Rule1D& gl = legendre(n);
  const int nj = std::min(n, kJacobiNodeCap);

  enum class Anchor { Upper, Lower, Interior };
  // value of the full integrand at distance d from an anchor
  auto integrand = [&](Anchor anchor, double e, int dir, double d, bool drop_u_real, bool drop_v_real) {
    double t, u, v;
    if (anchor == Anchor::Upper) {
      u = d, v = p.length - d, t = p.x - d;
    } else if (anchor == Anchor::Lower) {
      v = d, u = p.length - d, t = c + d;
    } else {
      t = e + dir * d, u = p.x - t, v = t - c;
    }
    Complex w = p.f(t);
    check_finite(w, t);
    if (w == Complex{}) return w;
    const Complex ea = drop_u_real ? Complex(0.0, p.a.imag()) + 1.0 : p.a;
    const Complex eb = drop_v_real ? Complex(0.0, p.b.imag()) + 1.0 : p.b;
    w *= real_power(u, ea - 1.0) * real_power(v, eb - 1.0);
    return w;
  };

  Complex total = 0.0;
  for (std::size_t s = 0; s + 1 < ends.size(); ++s) {
    const double lo = ends[s], hi = ends[s + 1];
    const double half = 0.5 * (hi - lo);
    // two halves, each graded toward its outer end
    for (int side = 0; side < 2; ++side) {
      const bool toward_hi = side == 1;
      const double anchor_t = toward_hi ? hi : lo;
      const int dir = toward_hi ? -1 : 1;
      Anchor anchor = Anchor::Interior;
      if (toward_hi && s + 2 == ends.size()) anchor = Anchor::Upper;
      if (!toward_hi && s == 0) anchor = Anchor::Lower;
      const bool singular_end = (anchor == Anchor::Upper && p.a != Complex(1.0)) ||
                                (anchor == Anchor::Lower && p.b != Complex(1.0));
      const int levels = anchor == Anchor::Upper ? k_upper : (anchor == Anchor::Lower ? k_lower : 12);
      double outer = half;
      for (int k = 0; k < levels; ++k) {
        const double inner = outer * kGrading;
        const double mid = 0.5 * (outer + inner), rad = 0.5 * (outer - inner);
        for (int i = 0; i < n; ++i) {
          const double d = mid + rad * gl.nodes[i];
          total += gl.weights[i] * rad * integrand(anchor, anchor_t, dir, d, false, false);
        }
        outer = inner;
      }
      // innermost panel [0, outer] in distance from the anchor
      const double h = 0.5 * outer;
      if (singular_end) {
        const double e = (anchor == Anchor::Upper ? p.a : p.b).real() - 1.0;
        const Rule1D& gj = jacobi(nj, e);
        // distance d = h (1 + t): d^{e} = h^{e} (1 + t)^{e}
        const double scale = std::pow(h, e + 1.0);
        for (int i = 0; i < nj; ++i) {
          const double d = h * (1.0 + gj.nodes[i]);
          Complex w = integrand(anchor, anchor_t, dir, d, anchor == Anchor::Upper, anchor == Anchor::Lower);
          total += gj.weights[i] * scale * w;
        }
      } else {
        for (int i = 0; i < n; ++i) {
          const double d = h * (1.0 + gl.nodes[i]);
          total += gl.weights[i] * h * integrand(anchor, anchor_t, dir, d, false, false);
        }
      }
    }
  }
  return total;
}

inline NumericResult adaptive(const WeightedProblem& p, int n0, int n_max) {
  if (n0 < 2) throw DomainError("node_count must be at least 2");
  int n = n0;
  Complex prev = weighted_integral(p, n), next = prev;
  while (2 * n <= n_max) {
    next = weighted_integral(p, 2 * n);
    const double diff = std::abs(next - prev);
    if (diff <= p.tol * std::max(1.0, std::abs(next))) return NumericResult{next, diff, {}};
    prev = next;
    n *= 2;
    if (2 * n > n_max)
      throw NonConvergenceError("quadrature did not converge: last two estimates differ by " + format_real(diff),
                                std::abs(next), std::abs(prev));
  }
  throw NonConvergenceError("node_count exceeds the refinement limit", std::abs(next), std::abs(prev));
}

inline double lower_end(double x, const QuadratureSpec& spec) {
  return spec.lower_bound ? *spec.lower_bound : x - spec.window;
}

inline void check_tail(const RealFunction& f, Complex alpha, double x, const QuadratureSpec& spec) {
  if (spec.lower_bound) return;
  if (!(spec.window > 0.0)) throw DomainError("truncation window must be positive");
  const double w = spec.window;
  const double scale = std::pow(w, alpha.real() - 1.0) * std::abs(special::reciprocal_gamma(alpha));
  for (double t : {x - w, x - 0.75 * w}) {
    const double bound = std::abs(f(t)) * scale * w;
    if (!(bound < spec.tolerance))
      throw DomainError("integrand does not decay on the window [x - W, x] (|f(" + format_real(t) + ")| = " +
                        format_real(std::abs(f(t))) +
                        "); the integral over (-inf, x] diverges or W is too small; use the symbolic rules "
                        "(analytic continuation) or a finite lower bound");
  }
}

}  // namespace detail

/// S^alpha f(x) for Re(alpha) > 0 by direct quadrature.
inline NumericResult differint_numeric(const RealFunction& f, Complex alpha, double x,
                                       const QuadratureSpec& spec = {}) {
  if (!(alpha.real() > 0.0))
    throw DomainError("differint_numeric needs Re(alpha) > 0; use differint_numeric_continued");
  if (!(spec.tolerance > 0.0)) throw DomainError("tolerance must be positive");
  const double c = detail::lower_end(x, spec);
  if (x <= c) return NumericResult{0.0, 0.0, {}};
  detail::check_tail(f, alpha, x, spec);
  detail::WeightedProblem p;
  p.f = f;
  p.x = x;
  p.length = x - c;
  p.a = alpha;
  p.breakpoints = spec.breakpoints;
  p.tol = spec.tolerance;
  NumericResult r = detail::adaptive(p, spec.node_count, spec.max_node_count);
  const Complex rg = special::reciprocal_gamma(alpha);
  r.value *= rg;
  r.error_estimate *= std::abs(rg);
  return r;
}

namespace detail {

// d/dt by 4th-order differences; one-sided when the stencil would cross the
// lower bound.
inline Complex fd_derivative(const RealFunction& f, int m, double t, double h, std::optional<double> lower) {
  if (m == 0) return f(t);
  auto g = [&](double s) { return fd_derivative(f, m - 1, s, h, lower); };
  if (!lower || t - 2.0 * h > *lower)
    return (g(t - 2 * h) - 8.0 * g(t - h) + 8.0 * g(t + h) - g(t + 2 * h)) / (12.0 * h);
  return (-25.0 * g(t) + 48.0 * g(t + h) - 36.0 * g(t + 2 * h) + 16.0 * g(t + 3 * h) - 3.0 * g(t + 4 * h)) /
         (12.0 * h);
}

}  // namespace detail

/// S^alpha f(x) for any complex alpha by the integer lift
///   1/Gamma(alpha+m) int_c^x f^{(m)}(t) (x-t)^{alpha+m-1} dt,  Re(alpha) + m > 0,
/// which equals S^alpha f when f and its first m-1 derivatives vanish at c.
/// Derivatives come from df when given, otherwise from finite differences
/// with step tolerance^{1/(m+4)}.
inline NumericResult differint_numeric_continued(const RealFunction& f, Complex alpha, double x,
                                                 const QuadratureSpec& spec = {},
                                                 const DerivativeFunction& df = {}) {
  int m = spec.lift_order;
  if (m == 0)
    while (alpha.real() + m <= 0.0) ++m;
  if (!(alpha.real() + m > 0.0))
    throw DomainError("lift_order " + std::to_string(m) + " does not make Re(alpha) + m positive");
  if (m == 0) return differint_numeric(f, alpha, x, spec);

  const double h = std::pow(spec.tolerance, 1.0 / (m + 4));
  const auto deriv = [&](int order, double t) -> Complex {
    if (order == 0) return f(t);
    if (df) return df(order, t);
    return detail::fd_derivative(f, order, t, h, spec.lower_bound);
  };
  const RealFunction fm = [&](double t) { return deriv(m, t); };
  NumericResult r;
  const Complex lifted = alpha + double(m);
  const double c = detail::lower_end(x, spec);
  if (x > c) r = differint_numeric(fm, lifted, x, spec);

  if (spec.lower_bound) {
    // f^{(j)}(c+) from the right of the bound
    const double eps = 1e-12 * std::max(1.0, std::fabs(c));
    for (int j = 0; j < m; ++j) {
      const Complex fj = deriv(j, c + eps);
      if (spec.rl_boundary_terms) {
        if (fj != Complex{} && x > c)
          r.value += fj * special::cpow(x - c, alpha + double(j)) * special::reciprocal_gamma(alpha + double(j) + 1.0);
      } else if (std::abs(fj) > spec.tolerance) {
        r.warnings.push_back("boundary term ignored: |f^(" + std::to_string(j) + ")(" + format_real(c) +
                             "+)| = " + format_real(std::abs(fj)) +
                             " exceeds the tolerance; the integer lift differs from the Riemann-Liouville value");
      }
    }
  }
  return r;
}

/// int_phi^z (z - t)^{a-1} (t - phi)^{b-1} dt, Re(a), Re(b) > 0.
inline Complex dirichlet_kernel_check(Complex a, Complex b, double z, double phi, const QuadratureSpec& spec = {}) {
  if (!(a.real() > 0.0 && b.real() > 0.0)) throw DomainError("dirichlet_kernel_check needs Re(a), Re(b) > 0");
  if (!(z > phi)) throw DomainError("dirichlet_kernel_check needs z > phi");
  detail::WeightedProblem p;
  p.f = [](double) { return Complex(1.0); };
  p.x = z;
  p.length = z - phi;
  p.a = a;
  p.b = b;
  p.tol = spec.tolerance;
  return detail::adaptive(p, spec.node_count, spec.max_node_count).value;
}

/// Numeric callable for an expression; singular points raise SingularError.
inline RealFunction as_function(const Expr& e) {
  return [e](double t) { return evaluate_at(e, t); };
}

/// Derivatives of an expression from the rule table.
inline DerivativeFunction as_derivatives(const Expr& e) {
  auto cache = std::make_shared<std::map<int, Expr>>();
  auto mu = std::make_shared<std::mutex>();
  return [e, cache, mu](int order, double t) {
    Expr d;
    {
      std::lock_guard<std::mutex> lock(*mu);
      auto it = cache->find(order);
      if (it == cache->end()) it = cache->emplace(order, differintegrate(e, -double(order)).expr).first;
      d = it->second;
    }
    return evaluate_at(d, t);
  };
}

/// Rejects expressions whose integral over (-inf, x] diverges for every
/// order (monomials, logarithms and their relatives).
inline void check_numeric_support(const Expr& e, const QuadratureSpec& spec) {
  if (spec.lower_bound) return;
  for (const Term& t : e.terms) {
    const bool growing = std::holds_alternative<Monomial>(t.kernel) || std::holds_alternative<ZeroFn>(t.kernel) ||
                         std::holds_alternative<Log>(t.kernel) || std::holds_alternative<LogMonomial>(t.kernel);
    if (growing)
      throw DomainError(std::string(kernel_name(t.kernel)) +
                        " terms do not decay toward -infinity, so the integral with lower bound -inf diverges; "
                        "use the symbolic engine, which continues it analytically, or give a finite lower bound");
  }
}

}  // namespace fracdd
