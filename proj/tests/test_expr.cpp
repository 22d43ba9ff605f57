#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fracdd/parse.hpp"

using namespace fracdd;

namespace {

Complex at(const Expr& e, Complex z) { return evaluate_at(e, z); }

}  // namespace

TEST(Normalize, ConstantsBecomeUnitMonomials) {
  const Expr e = parse_expr("3");
  ASSERT_EQ(e.terms.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<Monomial>(e.terms[0].kernel));
  EXPECT_EQ(std::get<Monomial>(e.terms[0].kernel).n, Complex(0.0));
  EXPECT_EQ(e.terms[0].coeff, Complex(3.0));
  EXPECT_FALSE(evaluate(e, 0.0).has_value());
}

TEST(Normalize, MergesAndDropsTerms) {
  const Expr e = parse_expr("2*z^2 - z^2 + exp(z) - exp(z)");
  ASSERT_EQ(e.terms.size(), 1u);
  EXPECT_EQ(e.terms[0].coeff, Complex(1.0));
  EXPECT_TRUE(parse_expr("z - z").empty());
}

TEST(Normalize, ZeroFunctionOfNegativeIntegerOrderIsMonomial) {
  // zero(-3) = z^2 / 2!
  const Expr e = normalize(Expr::of(ZeroFn{-3.0}));
  ASSERT_EQ(e.terms.size(), 1u);
  ASSERT_TRUE(std::holds_alternative<Monomial>(e.terms[0].kernel));
  EXPECT_EQ(std::get<Monomial>(e.terms[0].kernel).n, Complex(2.0));
  EXPECT_NEAR(e.terms[0].coeff.real(), 0.5, 1e-15);
}

TEST(Normalize, HeavisideMonomialFamily) {
  const Expr d = normalize(Expr::of(HeavisideMonomial{-2.0}));
  ASSERT_TRUE(std::holds_alternative<DeltaDeriv>(d.terms[0].kernel));
  EXPECT_EQ(std::get<DeltaDeriv>(d.terms[0].kernel).order, Complex(1.0));
  EXPECT_TRUE(std::holds_alternative<Heaviside>(normalize(Expr::of(HeavisideMonomial{0.0})).terms[0].kernel));
  const Expr f = normalize(Expr::of(DeltaDeriv{0.5}));
  ASSERT_TRUE(std::holds_alternative<HeavisideMonomial>(f.terms[0].kernel));
  EXPECT_EQ(std::get<HeavisideMonomial>(f.terms[0].kernel).power, Complex(-1.5));
}

TEST(Normalize, DegenerateParameters) {
  EXPECT_TRUE(std::holds_alternative<Log>(normalize(Expr::of(LogMonomial{0.0, 2.0})).terms[0].kernel));
  EXPECT_TRUE(std::holds_alternative<BoseKernel>(normalize(Expr::of(PolylogExp{0.0})).terms[0].kernel));
  EXPECT_TRUE(std::holds_alternative<Exponential>(normalize(Expr::of(MonomialExp{0.0, 2.0})).terms[0].kernel));
  EXPECT_TRUE(std::holds_alternative<MonomialExp>(normalize(Expr::of(KummerPair{1.0, 2.0, 0.0})).terms[0].kernel));
  const Expr s = normalize(Expr::of(Sin{0.0, kPi / 2}));
  ASSERT_TRUE(std::holds_alternative<Monomial>(s.terms[0].kernel));
  EXPECT_NEAR(s.terms[0].coeff.real(), 1.0, 1e-15);
}

TEST(Normalize, NegativeIntegerMonomialIsRejected) {
  EXPECT_THROW(parse_expr("z^-2"), DomainError);
  EXPECT_NO_THROW(parse_expr("z^-0.5"));
}

TEST(Evaluate, HeavisideAndDistributions) {
  const Expr h = parse_expr("H(z)");
  EXPECT_EQ(at(h, 0.0), Complex(0.5));
  EXPECT_EQ(at(h, 1.0), Complex(1.0));
  EXPECT_EQ(at(h, -1.0), Complex(0.0));
  const Expr d = parse_expr("delta(1, z)");
  EXPECT_EQ(at(d, 0.3), Complex(0.0));
  EXPECT_FALSE(evaluate(d, 0.0).has_value());
  EXPECT_THROW(evaluate_at(d, 0.0), SingularError);
}

TEST(Evaluate, ZeroFunctions) {
  // zero(0.5)(4) = 4^{-1.5} / Gamma(-0.5)
  EXPECT_NEAR(at(parse_expr("zero(0.5)"), 4.0).real(), 0.125 / (-2.0 * std::sqrt(kPi)), 1e-15);
  EXPECT_EQ(at(parse_expr("zero(2)"), 3.0), Complex(0.0));
  EXPECT_FALSE(evaluate(parse_expr("zero(0)"), 0.0).has_value());
}

TEST(Evaluate, LogarithmicKernels) {
  const Expr l = parse_expr("ln(2*z)");
  EXPECT_NEAR(at(l, 3.0).real(), std::log(6.0), 1e-15);
  // order 1: z (ln z - gamma - psi(2)) = z (ln z - 1)
  const Expr m = Expr::of(LogMonomial{1.0, 1.0});
  EXPECT_NEAR(at(m, 2.5).real(), 2.5 * (std::log(2.5) - 1.0), 1e-14);
  // order -1: psi(0)/Gamma(0) = -1, so the value is 1/z
  const Expr r = Expr::of(LogMonomial{-1.0, 1.0});
  EXPECT_NEAR(at(r, 4.0).real(), 0.25, 1e-15);
}

TEST(Evaluate, BoseAndPolylogKernels) {
  EXPECT_NEAR(at(parse_expr("bose(z)"), -1.0).real(), 1.0 / (std::exp(1.0) - 1.0), 1e-15);
  EXPECT_NEAR(at(Expr::of(PolylogExp{2.0}), 0.0).real(), kPi * kPi / 6.0, 1e-12);
  EXPECT_NEAR(at(Expr::of(PolylogExp{1.0}), -1.0).real(), -std::log(1.0 - std::exp(-1.0)), 1e-14);
  EXPECT_THROW(evaluate(Expr::of(PolylogExp{2.0}), 0.5), DomainError);
}

TEST(Translate, ShiftsTheArgument) {
  const Expr e = parse_expr("z^2 + exp(z)");
  const Expr t = translate(e, 1.5);
  for (double z : {-1.0, 0.7, 3.0})
    EXPECT_NEAR(std::abs(at(t, z) - at(e, z - 1.5)), 0.0, 1e-13) << z;
}

TEST(Multiply, StaysInClosure) {
  const Expr p = parse_expr("z^2*exp(3*z)");
  ASSERT_EQ(p.terms.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<MonomialExp>(p.terms[0].kernel));
  const Expr q = parse_expr("(z-1)^2*exp(z)");
  ASSERT_EQ(q.terms.size(), 1u);
  EXPECT_EQ(q.terms[0].shift, Complex(1.0));
  for (double z : {0.3, 2.0}) EXPECT_NEAR(at(q, z).real(), (z - 1) * (z - 1) * std::exp(z), 1e-13);
  const Expr h = parse_expr("H(z)*z^1.5");
  ASSERT_TRUE(std::holds_alternative<HeavisideMonomial>(h.terms[0].kernel));
  EXPECT_NEAR(at(h, 2.0).real(), std::pow(2.0, 1.5), 1e-13);
  EXPECT_THROW(parse_expr("H(z)*exp(z)"), UnsupportedError);
}

TEST(Parse, HyperbolicAndTrigForms) {
  const Expr s = parse_expr("sinh(2*z) + 3*cos(z - 1)");
  for (double z : {-0.4, 1.1})
    EXPECT_NEAR(at(s, z).real(), std::sinh(2 * z) + 3 * std::cos(z - 1), 1e-13);
  const Expr c = parse_expr("(1+2i)*exp(2i*z)");
  EXPECT_NEAR(std::abs(at(c, 0.5) - Complex(1, 2) * std::exp(Complex(0, 1.0))), 0.0, 1e-14);
}

TEST(Parse, ErrorColumns) {
  try {
    parse_formula("q^^");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column, 2u);
  }
  try {
    parse_formula("exp(z");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column, 6u);
  }
  EXPECT_THROW(parse_formula("x + t"), ParseError);
  EXPECT_THROW(parse_formula(""), ParseError);
}

TEST(Parse, NumericFormulaEvaluation) {
  const Formula f = parse_formula("x^2*exp(-x) + sin(pi*x)");
  EXPECT_EQ(f.variable(), "x");
  EXPECT_NEAR(f(2.0).real(), 4 * std::exp(-2.0) + std::sin(2 * kPi), 1e-14);
  const Formula g = parse_formula("-y + t");
  EXPECT_TRUE(g.uses_y());
  EXPECT_EQ(g.variable(), "t");
  EXPECT_EQ(g(2.0, 5.0), Complex(-3.0));
  EXPECT_EQ(parse_formula("H(x)")(0.0), Complex(0.5));
}

TEST(Render, RoundTripsThroughTheParser) {
  const char* inputs[] = {"exp(2*z)", "3*z^2 - z^0.5", "sin(2*z + 1) + cos(z)", "ln(3*z)",
                          "H(z-1)*(z-1)^0.5", "zero(0.5)", "delta(2, z)", "bose(z)",
                          "Li(2.5, exp(z))", "lnm(0.5, 2, z)", "kummer(1, 2, 0.5, z)",
                          "z^1.5*exp(-z)", "(2-1i)*exp((1+1i)*z)", "-z"};
  for (const char* in : inputs) {
    const Expr e = parse_expr(in);
    const std::string text = to_string(e);
    const Expr back = parse_expr(text);
    EXPECT_TRUE(structurally_equal(e, back)) << in << " -> " << text << " -> " << to_string(back);
  }
}

TEST(Render, ReadableText) {
  EXPECT_EQ(to_string(parse_expr("exp(2*z)")), "exp(2*z)");
  EXPECT_EQ(to_string(parse_expr("z - 2*z^3")), "z - 2*z^3");
  EXPECT_EQ(to_string(parse_expr("sin(z) * 1.5")), "1.5*sin(z)");
}

TEST(StructuralEquality, PhasesModuloTwoPi) {
  const Expr a = Expr::of(Sin{1.0, 0.25});
  Expr b = Expr::of(Sin{1.0, 0.25 + 2 * kPi});
  EXPECT_TRUE(structurally_equal(normalize(a), normalize(b)));
  EXPECT_TRUE(structurally_equal(a, b));
  EXPECT_FALSE(structurally_equal(a, Expr::of(Sin{1.0, 0.5})));
}

TEST(Evaluate, RandomPolynomialsAgreeWithFormula) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%.17g*z^2 + %.17g*exp(%.17g*z)", a, b, c);
    const Expr e = parse_expr(buf);
    const Formula f = parse_formula(buf);
    const double z = 0.5 + std::fabs(u(rng));
    EXPECT_NEAR(std::abs(at(e, z) - f(z)), 0.0, 1e-12) << buf;
  }
}
