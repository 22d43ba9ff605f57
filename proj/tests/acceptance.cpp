#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracdd/parse.hpp"
#include "fracdd/quadrature.hpp"
#include "fracdd/rules.hpp"
#include "fracdd/transforms.hpp"
#include "fracdd/volterra.hpp"

using namespace fracdd;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome within(double err, double tol, const std::string& what) {
  return {err < tol, what + " max err " + sci(err) + " (limit " + sci(tol) + ")"};
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

QuadratureSpec from(double c) {
  QuadratureSpec s;
  s.lower_bound = c;
  return s;
}

double smooth_step(double t) {
  auto g = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
  const double s = (t + 20.0) / 10.0;
  return g(s) / (g(s) + g(1.0 - s));
}

Complex heaviside_exp(double t) { return t > 0 ? std::exp(-t) : (t < 0 ? 0.0 : 0.5); }

Outcome endpoint_identities() {
  struct Case {
    RealFunction f, df;
    QuadratureSpec spec;
    double a, b;
  };
  QuadratureSpec zero = from(0.0);
  zero.rl_boundary_terms = true;
  const std::vector<Case> cases = {
      {heaviside_exp, [](double t) -> Complex { return -std::exp(-t); }, zero, 0.2, 3.0},
      {[](double t) -> Complex { return t > 0 ? t * t : 0.0; }, [](double t) -> Complex { return 2 * t; }, zero, 0.2,
       3.0},
      {[](double t) -> Complex { return std::sin(t) * smooth_step(t); }, [](double t) -> Complex { return std::cos(t); },
       QuadratureSpec{}, -5.0, 4.0},
  };
  double err = 0.0;
  for (const Case& c : cases)
    for (double x : linspace(c.a, c.b, 10)) {
      err = std::max(err, std::abs(differint_numeric_continued(c.f, 0.0, x, c.spec).value - c.f(x)));
      err = std::max(err, std::abs(differint_numeric_continued(c.f, -1.0, x, c.spec).value - c.df(x)));
    }
  return within(err, 1e-5, "S^0 f = f and S^-1 f = f' over 3 functions x 10 points:");
}

Outcome index_law() {
  const std::vector<Expr> kernels = {
      parse_expr("z^1.5"),         parse_expr("3"),          parse_expr("zero(0.3)"),
      parse_expr("delta(0, z)"),   parse_expr("H(z)"),       parse_expr("H(z)*z^0.7"),
      parse_expr("exp(2*z)"),      parse_expr("sin(2*z + 0.3)"), parse_expr("cos(z)"),
      parse_expr("ln(2*z)"),       parse_expr("bose(z)"),    parse_expr("Li(1.5, exp(z))"),
      parse_expr("z^2*exp(z)"),    parse_expr("kummer(0.5, 1.5, 0.25, z)"),
  };
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int mismatches = 0;
  for (const Expr& e : kernels)
    for (int i = 0; i < 200; ++i) {
      const double a = u(rng), b = u(rng);
      if (!structurally_equal(differintegrate(differintegrate(e, b).expr, a).expr, differintegrate(e, a + b).expr,
                              1e-8))
        ++mismatches;
    }
  const QuadratureSpec spec = from(0.0);
  const RealFunction inner = [&](double t) { return differint_numeric(heaviside_exp, 0.7, t, spec).value; };
  double err = 0.0;
  for (double x : {0.5, 1.0, 2.0})
    err = std::max(err, std::abs(differint_numeric(inner, 0.3, x, spec).value -
                                 differint_numeric(heaviside_exp, 1.0, x, spec).value));
  return {mismatches == 0 && err < 1e-5, std::to_string(mismatches) + " structural mismatches in " +
                                             std::to_string(200 * kernels.size()) +
                                             " pairs; numeric S^0.3 S^0.7 vs S^1 max err " + sci(err)};
}

Outcome beta_kernel() {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> re(0.2, 3.0), im(-1.0, 1.0), len(0.5, 3.0);
  double err = std::abs(dirichlet_kernel_check(0.5, 0.5, 1.0, 0.0) - kPi) / kPi;
  for (int i = 0; i < 50; ++i) {
    const Complex a(re(rng), im(rng)), b(re(rng), im(rng));
    const double L = len(rng);
    const Complex want =
        special::gamma(a) * special::gamma(b) * special::reciprocal_gamma(a + b) * special::cpow(L, a + b - 1.0);
    err = std::max(err, std::abs(dirichlet_kernel_check(a, b, 1.0 + L, 1.0) - want) / std::abs(want));
  }
  return within(err, 1e-7, "50 random complex pairs plus the pi case, relative");
}

Outcome gamma_identity() {
  const RealFunction ex = [](double t) { return Complex(std::exp(t)); };
  double err = 0.0;
  for (double a : {0.25, 0.5, 1.5, 2.5}) err = std::max(err, std::abs(differint_numeric(ex, a, 0.0).value - 1.0));
  const double g = (differint_numeric(ex, 0.5, 0.0).value * special::gamma(0.5)).real();
  return {err < 1e-7 && std::fabs(g - 1.7724538509) < 1e-7,
          "|S^a e^t(0) - 1| max " + sci(err) + "; Gamma(1/2) = " + std::to_string(g)};
}

Outcome zeta_identity() {
  const RealFunction bose = as_function(parse_expr("bose(z)"));
  const double oracles[] = {1.6449340668, 1.2020569031, 1.0823232337};
  QuadratureSpec spec;
  spec.breakpoints = {};
  double err = 0.0;
  for (int s = 2; s <= 4; ++s)
    err = std::max(err, std::abs(differint_numeric(bose, double(s), 0.0, spec).value - oracles[s - 2]));
  return within(err, 1e-6, "S^s bose at 0 vs zeta(s), s = 2, 3, 4:");
}

Outcome rule_agreement() {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ua(0.1, 2.5), ux(0.2, 3.0);
  const QuadratureSpec zero = from(0.0), inf{};
  double worst = 0.0;
  std::string worst_rule;
  auto track = [&](const std::string& rule, Complex num, Complex sym) {
    const double e = std::abs(num - sym) / std::max(1.0, std::abs(sym));
    if (e > worst) {
      worst = e;
      worst_rule = rule;
    }
  };
  const RealFunction H = [](double t) -> Complex { return t > 0 ? 1.0 : (t < 0 ? 0.0 : 0.5); };
  const Expr hm = parse_expr("H(z)*z^1.5"), h = parse_expr("H(z)"), d = parse_expr("delta(0, z)"),
             ex = parse_expr("exp((1.3+0.4i)*z)"), ln = parse_expr("ln(z)"), me = parse_expr("z*exp(z)"),
             bose = parse_expr("bose(z)");
  for (int i = 0; i < 10; ++i) {
    const double a = ua(rng), x = ux(rng);
    auto sym = [&](const Expr& e, double alpha, double at) { return evaluate_at(differintegrate(e, alpha).expr, at); };
    track("heaviside-monomial", differint_numeric(as_function(hm), a, x, zero).value, sym(hm, a, x));
    track("heaviside", differint_numeric(H, a, x, zero).value, sym(h, a, x));
    // S^a delta = S^{a-1} H
    const double ad = 1.05 + 0.5 * a;
    track("delta", differint_numeric(H, ad - 1.0, x, zero).value, sym(d, ad, x));
    track("exponential", differint_numeric(as_function(ex), a, x - 1.5, inf).value, sym(ex, a, x - 1.5));
    track("logarithm", differint_numeric(as_function(ln), a, x, zero).value, sym(ln, a, x));
    track("monomial-exponential", differint_numeric(as_function(me), a, x - 1.5, inf).value, sym(me, a, x - 1.5));
    track("bose-polylog", differint_numeric(as_function(bose), a, -x, inf).value, sym(bose, a, -x));
  }
  return within(worst, 1e-5, "7 rules x 10 points, worst rule " + worst_rule + ":");
}

Outcome complimentary_series() {
  // RL half-derivative of e^x from 0, evaluated at 1
  QuadratureSpec spec = from(0.0);
  spec.rl_boundary_terms = true;
  const RealFunction e = [](double t) { return Complex(std::exp(t)); };
  const DerivativeFunction de = [](int, double t) { return Complex(std::exp(t)); };
  const Complex rl = differint_numeric_continued(e, -0.5, 1.0, spec, de).value;
  const Expr f = parse_expr("exp(z)");
  const ComplimentarySeries c = complimentary_coefficients(f, 0.0, 15);
  Complex correction = 0.0;
  for (std::size_t k = 0; k < 15; ++k) correction += c.coefficients[k] * zero_function_value(double(k) + 0.5, 1.0);
  const Complex canonical = evaluate_at(differintegrate(f, -0.5).expr, 1.0);
  const double err = std::abs(rl + correction - canonical);
  return within(err, 1e-5, "RL + sum_{k<15} c_k zero^(k+1/2)(1) vs S^-1/2 e^x(1) = " + sci(canonical.real()) +
                               "; correction sum " + sci(correction.real()) + ", series terms grow like k!:");
}

Outcome transforms() {
  const Expr f = parse_expr("3*exp(-2*z) + sin(z)");
  bool exact = true;
  for (double s : {0.5, 1.0, 2.5}) exact = exact && laplace_frac(f, 0.0, s) == evaluate_at(f, s);
  const RealFunction g2 = [](double t) -> Complex { return t > 0 ? t * std::exp(-2 * t) : 0.0; };
  double err = 0.0;
  for (double s : {1.0, 2.0, 5.0}) {
    err = std::max(err, std::abs(laplace_frac_numeric(heaviside_exp, 1.0, s).value - 1.0 / (s + 1.0)));
    err = std::max(err, std::abs(laplace_frac_numeric(g2, 1.0, s).value - 1.0 / ((s + 2.0) * (s + 2.0))));
  }
  double zerr = 0.0;
  for (double a : {0.25, 0.5, 0.75})
    for (double s : {0.5, 2.0, 7.0})
      zerr = std::max(zerr, std::abs(laplace_frac(Expr::of(ZeroFn{a}), 1.0, s) - std::pow(s, a)));
  return {exact && err < 1e-6 && zerr < 1e-8, std::string("alpha = 0 exact: ") + (exact ? "yes" : "no") +
                                                  "; classical Laplace max err " + sci(err) +
                                                  "; L[zero^(a)] vs s^a max err " + sci(zerr)};
}

Outcome solvers() {
  const Expr one = parse_expr("z^0");
  const double e1 = std::abs(picard_series(one, 1.0, 25)(1.0) - std::exp(1.0));
  const double e2 = std::abs(picard_series(one, 0.5, 40)(1.0) - special::mittag_leffler(0.5, 1.0));
  auto relaxation = [](double alpha, double h) {
    FDEProblem p;
    p.alpha = alpha;
    p.rhs = [](double, Complex y) { return -y; };
    p.initial_data = {{0.0, 1.0}};
    p.h = h;
    p.lipschitz = 1.0;
    return solve_fde(p);
  };
  const SampledSolution s = relaxation(0.5, 1e-3);
  double e3 = 0.0;
  for (double x : {0.25, 0.5, 1.0}) {
    const auto i = static_cast<std::size_t>(std::lround(x / 1e-3));
    e3 = std::max(e3, std::abs(s.y[i] - special::mittag_leffler(0.5, -std::sqrt(x))));
  }
  std::vector<double> errs;
  for (double h : {1e-2, 1e-3, 1e-4}) errs.push_back(std::abs(relaxation(1.0, h).y.back() - std::exp(-1.0)));
  const bool monotone = errs[0] > errs[1] && errs[1] > errs[2];
  return {e1 < 1e-9 && e2 < 1e-8 && e3 < 2e-3 && errs[1] < 1e-3 && monotone,
          "picard e err " + sci(e1) + ", E_1/2(1) err " + sci(e2) + ", fractional relaxation err " + sci(e3) +
              ", relaxation errs " + sci(errs[0]) + " > " + sci(errs[1]) + " > " + sci(errs[2])};
}

Outcome log_limit() {
  double err = 0.0;
  for (double z : {0.5, 1.0, 2.0})
    err = std::max(err, std::abs(evaluate_at(Expr::of(LogMonomial{-1.0 + 1e-6, 1.0}), z) - 1.0 / z));
  return within(err, 1e-5, "LogMonomial at order -1+1e-6 vs 1/z:");
}

Outcome zero_functions() {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int nonzero = 0;
  for (int i = 0; i < 100; ++i) {
    Complex z(u(rng), u(rng));
    if (z == Complex{}) z = 1.0;
    for (int k = 0; k < 4; ++k)
      if (evaluate_at(Expr::of(ZeroFn{double(k)}), z) != Complex{}) ++nonzero;
  }
  const Complex half = evaluate_at(differintegrate(Expr::of(ZeroFn{0.0}), -0.5).expr, 1.0);
  return {nonzero == 0 && std::abs(half) > 0.1, std::to_string(nonzero) +
                                                    " nonzero integer-order values at 400 samples; |S^-1/2 zero(1)| = " +
                                                    sci(std::abs(half))};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"endpoint operator identities", endpoint_identities},
      {"index law", index_law},
      {"beta-kernel identity", beta_kernel},
      {"gamma identity", gamma_identity},
      {"zeta identity", zeta_identity},
      {"symbolic vs numeric agreement", rule_agreement},
      {"complimentary series", complimentary_series},
      {"transforms", transforms},
      {"solvers", solvers},
      {"log-rule limit", log_limit},
      {"zero-function algebra", zero_functions},
  };
  return all;
}

bool run_one(std::size_t i) {
  const Criterion& c = criteria()[i];
  Outcome o;
  try {
    o = c.check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = criteria().size();
  if (argc > 1) {
    const long i = std::strtol(argv[1], nullptr, 10);
    if (i < 1 || static_cast<std::size_t>(i) > n) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", n);
      return 2;
    }
    return run_one(static_cast<std::size_t>(i - 1)) ? 0 : 1;
  }
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) ok = run_one(i) && ok;
  return ok ? 0 : 1;
}
