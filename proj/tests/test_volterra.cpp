#include <gtest/gtest.h>

#include <cmath>

#include "fracdd/parse.hpp"
#include "fracdd/volterra.hpp"

using namespace fracdd;

namespace {

FDEProblem relaxation(double alpha, double lambda, double h) {
  FDEProblem p;
  p.alpha = alpha;
  p.rhs = [lambda](double, Complex y) { return lambda * y; };
  p.initial_data = {{0.0, 1.0}};
  p.h = h;
  p.lipschitz = std::fabs(lambda);
  return p;
}

Complex at(const SampledSolution& s, double x) {
  for (std::size_t i = 0; i < s.x.size(); ++i)
    if (std::fabs(s.x[i] - x) < 1e-12) return s.y[i];
  ADD_FAILURE() << "no grid point at " << x;
  return 0.0;
}

}  // namespace

TEST(VolterraForm, DocumentedExamples) {
  FDEProblem p;
  p.alpha = 1.0;
  p.initial_data = {{0.0, 1.0}};
  p.rhs_expr = Expr{};
  EXPECT_TRUE(structurally_equal(volterra_form(p).solution(), Expr::of(Monomial{0.0})));

  p.alpha = 0.5;
  p.rhs_expr = parse_expr("z^0");
  const Expr y = volterra_form(p).solution();
  for (double x : {0.3, 1.0, 2.0})
    EXPECT_NEAR(std::abs(evaluate_at(y, x) - (1.0 + std::sqrt(x) / std::tgamma(1.5))), 0.0, 1e-13);

  // y'' = 1, y(0) = a, y'(0) = b
  p.alpha = 2.0;
  p.initial_data = {{0.0, 3.0}, {1.0, -2.0}};
  const Expr y2 = volterra_form(p).solution();
  for (double x : {0.5, 1.5}) EXPECT_NEAR(evaluate_at(y2, x).real(), 3.0 - 2.0 * x + x * x / 2, 1e-13);
}

TEST(VolterraForm, DifferentiatingRecoversEquation) {
  // S^{-alpha} y = sum_k value_k x^{a_k - alpha} / Gamma(1 + a_k - alpha) + f
  FDEProblem p;
  p.alpha = 0.5;
  p.initial_data = {{0.0, 2.0}, {0.25, 1.0}};
  p.rhs_expr = parse_expr("exp(z)");
  const Expr d = differintegrate(volterra_form(p).solution(), -0.5).expr;
  for (double x : {0.4, 1.3}) {
    const double want = 2.0 * std::pow(x, -0.5) / std::tgamma(0.5) + std::pow(x, -0.25) / std::tgamma(0.75) + std::exp(x);
    EXPECT_NEAR(std::abs(evaluate_at(d, x) - want), 0.0, 1e-12) << x;
  }
  // integer gaps leave only zero functions, which vanish away from 0
  p.alpha = 1.0;
  p.initial_data = {{0.0, 2.0}};
  p.rhs_expr = Expr{};
  const Expr z = differintegrate(volterra_form(p).solution(), -1.0).expr;
  for (double x : {0.5, 1.0, 3.0}) EXPECT_EQ(evaluate_at(z, x), Complex{});
}

TEST(VolterraForm, RejectsBadInitialData) {
  FDEProblem p;
  p.initial_data = {{0.5, 1.0}, {0.5, 2.0}};
  EXPECT_THROW(volterra_form(p), DomainError);
  p.initial_data = {{-1.0, 1.0}};
  EXPECT_THROW(volterra_form(p), DomainError);
}

TEST(PicardSeries, DocumentedExamples) {
  const Expr one = parse_expr("z^0");
  EXPECT_NEAR(std::abs(picard_series(one, 1.0, 25)(1.0) - std::exp(1.0)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(picard_series(one, 0.5, 40)(1.0) - special::mittag_leffler(0.5, 1.0)), 0.0, 1e-8);
  const SeriesSolution s = picard_series(parse_expr("sin(z)"), 0.7, 1);
  ASSERT_EQ(s.terms.size(), 1u);
  EXPECT_TRUE(structurally_equal(s.terms[0], parse_expr("sin(z)")));
}

TEST(PicardSeries, TailShrinksWithTruncation) {
  const Expr one = parse_expr("z^0");
  double prev = INFINITY;
  for (std::size_t J : {5, 10, 20, 30}) {
    const double t = picard_series(one, 0.5, J).tail_estimate;
    EXPECT_LT(t, prev) << J;
    prev = t;
  }
}

TEST(SolveFde, ClassicalRelaxation) {
  const SampledSolution s = solve_fde(relaxation(1.0, -1.0, 1e-3));
  EXPECT_NEAR(s.y.back().real(), std::exp(-1.0), 1e-3);
  double prev = INFINITY;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const double err = std::fabs(solve_fde(relaxation(1.0, -1.0, h)).y.back().real() - std::exp(-1.0));
    EXPECT_LT(err, prev) << h;
    prev = err;
  }
}

TEST(SolveFde, FractionalRelaxationMatchesMittagLeffler) {
  const SampledSolution s = solve_fde(relaxation(0.5, -1.0, 1e-3));
  for (double x : {0.25, 0.5, 1.0}) {
    const Complex want = special::mittag_leffler(0.5, -std::sqrt(x));
    EXPECT_LT(std::abs(at(s, x) - want), 2e-3) << x;
  }
}

TEST(SolveFde, ZeroRhsGivesInitialPolynomial) {
  FDEProblem p = relaxation(1.5, 0.0, 1e-2);
  p.initial_data = {{0.0, 1.0}, {0.5, 2.0}};
  const SampledSolution s = solve_fde(p);
  for (std::size_t i = 0; i < s.x.size(); ++i)
    EXPECT_NEAR(std::abs(s.y[i] - (1.0 + 2.0 * std::sqrt(s.x[i]) / std::tgamma(1.5))), 0.0, 1e-14);
}

TEST(SolveFde, AgreesWithPicardSeries) {
  // y = 1 - S^a y sums to sum_j (-1)^j S^{ja} z^0
  for (double a : {1.0, 0.5}) {
    const SampledSolution s = solve_fde(relaxation(a, -1.0, 1e-3));
    const SeriesSolution u = picard_series(parse_expr("z^0"), a, 80);
    for (double x : {0.5, 1.0}) {
      Complex sum = 0.0;
      for (std::size_t j = 0; j < u.terms.size(); ++j) sum += (j % 2 ? -1.0 : 1.0) * evaluate_at(u.terms[j], x);
      EXPECT_LT(std::abs(at(s, x) - sum), 5e-3) << a << " " << x;
    }
  }
}

TEST(SolveFde, Errors) {
  EXPECT_THROW(solve_fde(relaxation(0.5, -1e4, 0.1)), ContractionError);
  try {
    solve_fde(relaxation(1.0, -20.0, 0.1));
    FAIL();
  } catch (const ContractionError& e) {
    EXPECT_NEAR(e.ratio, 2.0, 1e-12);
  }
  EXPECT_THROW(solve_fde(relaxation(1.0, -1.0, -0.1)), DomainError);
}

TEST(SolveBoundary, DocumentedExamples) {
  BoundaryProblem p;
  p.alpha = 1.0;
  p.rhs_expr = Expr{};
  p.conditions = {{0.0, 1.0, 3.0}};
  BoundarySolution b = solve_boundary(p);
  EXPECT_NEAR(std::abs(b.constants[0] - 3.0), 0.0, 1e-14);
  for (Complex y : b.samples.y) EXPECT_NEAR(std::abs(y - 3.0), 0.0, 1e-14);

  p.alpha = 2.0;
  p.conditions = {{0.0, 0.0, 0.0}, {0.0, 1.0, 1.0}};
  b = solve_boundary(p);
  EXPECT_NEAR(std::abs(b.constants[0] - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(b.constants[1]), 0.0, 1e-14);
  for (std::size_t i = 0; i < b.samples.x.size(); ++i) EXPECT_NEAR(b.samples.y[i].real(), b.samples.x[i], 1e-14);

  p.alpha = 0.5;
  p.rhs_expr = parse_expr("exp(z)");
  p.conditions = {{0.0, 1.0, 2.0}};
  b = solve_boundary(p);
  EXPECT_LT(b.residual, 1e-8);
  // y(1) = c + S^{1/2} e^z at 1 = c + e
  EXPECT_NEAR(std::abs(b.constants[0] - (2.0 - std::exp(1.0))), 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(b.samples.y[0].real()));
}

TEST(SolveBoundary, NonlinearOuterIteration) {
  // y = c + int_0^x -y, y(1) = 1  =>  y = e^{1-x}
  BoundaryProblem p;
  p.alpha = 1.0;
  p.rhs = [](double, Complex y) { return -y; };
  p.conditions = {{0.0, 1.0, 1.0}};
  const BoundarySolution b = solve_boundary(p);
  EXPECT_NEAR(b.constants[0].real(), std::exp(1.0), 1e-5);
  EXPECT_NEAR(at(b.samples, 0.5).real(), std::exp(0.5), 1e-5);
  EXPECT_LT(b.residual, 1e-8);
}

TEST(SolveBoundary, Errors) {
  BoundaryProblem p;
  p.alpha = 2.0;
  p.rhs_expr = Expr{};
  p.conditions = {{0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}};
  EXPECT_THROW(solve_boundary(p), SingularError);
  p.conditions = {};
  EXPECT_THROW(solve_boundary(p), DomainError);
}

TEST(ContractionFixedPoint, DocumentedExamples) {
  const double h = 1e-3;
  std::vector<Complex> b(901, 1.0);
  auto zero = [](const std::vector<Complex>& u) { return std::vector<Complex>(u.size(), 0.0); };
  EXPECT_EQ(contraction_fixed_point(zero, b, 10), b);

  auto S1 = [h](const std::vector<Complex>& u) { return fractional_integral_on_grid(1.0, h, u); };
  const std::vector<Complex> x = contraction_fixed_point(S1, b, 30);
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x[i] - std::exp(h * double(i))));
  EXPECT_LT(err, 1e-6);

  auto S2 = [h](const std::vector<Complex>& u) {
    auto v = fractional_integral_on_grid(1.0, h, u);
    for (auto& z : v) z *= 2.0;
    return v;
  };
  try {
    contraction_fixed_point(S2, b, 30);
    FAIL();
  } catch (const ContractionError& e) {
    EXPECT_NEAR(e.ratio, 1.8, 1e-9);
  }
  EXPECT_THROW(contraction_fixed_point(S1, b, 3), NonConvergenceError);
}

TEST(FractionalIntegralOnGrid, MatchesMonomialRule) {
  const double h = 1e-3, a = 0.6;
  std::vector<Complex> u(1001);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = h * double(i);
  const auto g = fractional_integral_on_grid(a, h, u);
  // S^a z = z^{1+a} / Gamma(2+a), exact for piecewise-linear data
  EXPECT_NEAR(std::abs(g.back() - 1.0 / std::tgamma(2.0 + a)), 0.0, 1e-12);
}
