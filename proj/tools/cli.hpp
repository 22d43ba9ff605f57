#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracdd/parse.hpp"
#include "fracdd/quadrature.hpp"
#include "fracdd/rules.hpp"
#include "fracdd/transforms.hpp"
#include "fracdd/volterra.hpp"

namespace fracdd::cli {

using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kRowErrors = 1, kUsage = 2 };

struct Options {
  std::string expression;
  std::string kind;  // transform kind
  std::string alpha = "1";
  std::string alpha_range;
  std::string x = "1";
  std::string x_range;
  std::string s;
  std::string s_range;
  std::string lower = "-inf";
  std::string engine;
  std::string format = "csv";
  std::string out;
  double window = 60.0;
  double tol = 1e-8;
  int nodes = 64;
  bool table = false;
  // solve
  std::string rhs;
  std::vector<std::string> init;
  std::vector<std::string> boundary;
  double X = 1.0;
  double h = 1e-3;
  double lipschitz = 0.0;
  // series / complimentary
  int terms = 0;
  double x0 = 0.0;
};

// A result table: semantic JSON rows plus their CSV projection.
struct Table {
  std::vector<std::string> header;
  std::vector<json> rows;
  std::vector<std::vector<std::string>> csv;
  bool failed = false;
};

namespace detail {

inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json complex_json(Complex z) { return json{{"re", real_json(z.real())}, {"im", real_json(z.imag())}}; }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline Complex parse_constant(const std::string& text) {
  const Formula f = parse_formula(text);
  if (!f.variable().empty() || f.uses_y()) throw ParseError("expected a constant, got '" + text + "'", 1);
  return f(0.0);
}

inline double parse_real(const std::string& text) {
  const Complex z = parse_constant(text);
  if (z.imag() != 0.0) throw DomainError("expected a real number, got '" + text + "'");
  return z.real();
}

inline std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw DomainError("range must be start:stop:step, got '" + text + "'");
  const double a = parse_real(parts[0]), b = parse_real(parts[1]), step = parse_real(parts[2]);
  if (!(step > 0.0)) throw DomainError("range step must be positive");
  if (b < a) throw DomainError("range is empty: stop < start");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(a + step * double(i));
  return out;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');)
    if (!p.empty()) out.push_back(p);
  return out;
}

inline std::vector<Complex> complex_list(const std::string& list, const std::string& range) {
  std::vector<Complex> out;
  if (!range.empty()) {
    for (double v : parse_range(range)) out.push_back(v);
    return out;
  }
  for (const auto& p : split_list(list)) out.push_back(parse_constant(p));
  if (out.empty()) throw DomainError("no sample points given");
  return out;
}

inline std::vector<double> real_list(const std::string& list, const std::string& range) {
  std::vector<double> out;
  for (Complex z : complex_list(list, range)) {
    if (z.imag() != 0.0) throw DomainError("sample points must be real");
    out.push_back(z.real());
  }
  return out;
}

inline QuadratureSpec quadrature_spec(const Options& o) {
  QuadratureSpec spec;
  spec.window = o.window;
  spec.tolerance = o.tol;
  spec.node_count = o.nodes;
  if (o.lower != "-inf") spec.lower_bound = parse_real(o.lower);
  return spec;
}

// Expression as a numeric callable and, when it has one, a closed form.
struct Input {
  Formula formula;
  std::optional<Expr> expr;
  std::string closed_form_error;

  RealFunction function() const {
    const Formula f = formula;
    return [f](double t) { return f(t); };
  }
};

inline Input read_input(const std::string& text) {
  Input in;
  in.formula = parse_formula(text);
  try {
    in.expr = to_expr(in.formula);
  } catch (const Error& e) {
    in.closed_form_error = e.what();
  }
  return in;
}

inline std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const PoleError*>(&e)) return "pole";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const NonConvergenceError*>(&e)) return "non-convergence";
  if (dynamic_cast<const SingularError*>(&e)) return "singular";
  if (dynamic_cast<const UnsupportedError*>(&e)) return "unsupported";
  if (dynamic_cast<const ContractionError*>(&e)) return "contraction";
  return "error";
}

// One evaluation: value and error estimate, or the failure message.
struct Sample {
  Complex value{NAN, NAN};
  double error = NAN;
  std::string failure;
  std::vector<std::string> warnings;
};

template <class F>
Sample attempt(F&& f) {
  Sample s;
  try {
    f(s);
  } catch (const std::exception& e) {
    s.value = Complex(NAN, NAN);
    s.error = NAN;
    s.failure = e.what();
  }
  return s;
}

// Rows of the x,re,im,engine,est_error family.
inline void add_value_row(Table& t, const std::string& key, double at, const std::string& engine, const Sample& s,
                          std::optional<double> abs_diff = {}, std::optional<Complex> alpha = {}) {
  json row{{key, at}, {"value", complex_json(s.value)}, {"engine", engine}, {"est_error", real_json(s.error)}};
  std::vector<std::string> line{number(at), number(s.value.real()), number(s.value.imag()), engine, number(s.error)};
  if (abs_diff) {
    row["abs_diff"] = real_json(*abs_diff);
    line.push_back(number(*abs_diff));
  }
  if (alpha) {
    row["alpha"] = complex_json(*alpha);
    line.push_back(number(alpha->real()));
  }
  if (!s.warnings.empty()) row["warnings"] = s.warnings;
  if (!s.failure.empty()) {
    row["error"] = s.failure;
    t.failed = true;
  }
  t.rows.push_back(std::move(row));
  t.csv.push_back(std::move(line));
}

inline void write_table(const Table& t, const Options& o, std::ostream& out, std::ostream& err) {
  if (o.format == "json") {
    json doc{{"ok", !t.failed}, {"columns", t.header}, {"rows", t.rows}};
    if (t.failed) {
      json errors = json::array();
      for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].contains("error")) errors.push_back(json{{"row", i}, {"message", t.rows[i]["error"]}});
      doc["errors"] = errors;
    }
    out << doc.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << "\n";
  for (const auto& line : t.csv) {
    for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << csv_field(line[i]);
    out << "\n";
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].contains("error")) err << "row " << i << ": " << t.rows[i]["error"].get<std::string>() << "\n";
    if (t.rows[i].contains("warnings"))
      for (const auto& w : t.rows[i]["warnings"]) err << "row " << i << " warning: " << w.get<std::string>() << "\n";
  }
}

inline std::vector<Complex> alphas(const Options& o) {
  if (!o.alpha_range.empty()) return complex_list("", o.alpha_range);
  return {parse_constant(o.alpha)};
}

inline Sample numeric_differint(const Input& in, Complex a, double x, const QuadratureSpec& spec) {
  return attempt([&](Sample& s) {
    if (in.formula.uses_y()) throw DomainError("the expression depends on y");
    if (in.expr) check_numeric_support(*in.expr, spec);
    NumericResult r;
    if (a.real() > 0.0)
      r = differint_numeric(in.function(), a, x, spec);
    else
      r = differint_numeric_continued(in.function(), a, x, spec, in.expr ? as_derivatives(*in.expr) : nullptr);
    s.value = r.value;
    s.error = r.error_estimate;
    s.warnings = r.warnings;
  });
}

inline Sample symbolic_differint(const Input& in, Complex a, double x) {
  return attempt([&](Sample& s) {
    if (!in.expr) throw UnsupportedError("no closed form: " + in.closed_form_error);
    s.value = evaluate_at(differintegrate(*in.expr, a).expr, x);
    s.error = 0.0;
  });
}

// ---- subcommands ----

inline int cmd_diff(const Options& o, std::ostream& out, std::ostream& err) {
  const Expr e = parse_expr(o.expression);
  const auto as = alphas(o);
  if (o.table) {
    Options eo = o;
    Table t;
    t.header = {"x", "re", "im", "engine", "est_error"};
    if (as.size() > 1) t.header.push_back("alpha");
    const Input in{parse_formula(o.expression), e, {}};
    for (Complex a : as)
      for (double x : real_list(o.x, o.x_range))
        add_value_row(t, "x", x, "symbolic", symbolic_differint(in, a, x), {},
                      as.size() > 1 ? std::optional<Complex>(a) : std::nullopt);
    write_table(t, eo, out, err);
    return t.failed ? kRowErrors : kOk;
  }
  json results = json::array();
  std::vector<std::string> texts;
  for (Complex a : as) {
    const RuleResult r = differintegrate(e, a);
    json rules = json::array();
    for (Rule rule : r.rule_applied) rules.push_back(rule_name(rule));
    results.push_back(json{{"alpha", complex_json(a)},
                           {"result", r.text},
                           {"normalized", to_string(r.expr)},
                           {"rules", rules},
                           {"branch_notes", r.branch_notes}});
    texts.push_back(r.text);
  }
  if (o.format == "json") {
    out << json{{"ok", true}, {"input", to_string(e)}, {"results", results}}.dump(2) << "\n";
  } else if (as.size() == 1) {
    out << texts[0] << "\n";
  } else {
    out << "alpha,result\n";
    for (std::size_t i = 0; i < as.size(); ++i) out << number(as[i].real()) << "," << csv_field(texts[i]) << "\n";
  }
  return kOk;
}

inline int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const Input in = read_input(o.expression);
  const QuadratureSpec spec = quadrature_spec(o);
  const std::string engine = o.engine.empty() ? "numeric" : o.engine;
  if (engine != "symbolic" && engine != "numeric" && engine != "both")
    throw DomainError("engine must be symbolic, numeric or both");
  const auto as = alphas(o);
  const bool sweep = as.size() > 1;
  Table t;
  t.header = {"x", "re", "im", "engine", "est_error"};
  if (engine == "both") t.header.push_back("abs_diff");
  if (sweep) t.header.push_back("alpha");
  const auto tag = [&](Complex a) { return sweep ? std::optional<Complex>(a) : std::nullopt; };
  for (Complex a : as)
    for (double x : real_list(o.x, o.x_range)) {
      if (engine == "symbolic") {
        add_value_row(t, "x", x, engine, symbolic_differint(in, a, x), {}, tag(a));
      } else if (engine == "numeric") {
        add_value_row(t, "x", x, engine, numeric_differint(in, a, x, spec), {}, tag(a));
      } else {
        const Sample sy = symbolic_differint(in, a, x), nu = numeric_differint(in, a, x, spec);
        const double d = std::abs(sy.value - nu.value);
        add_value_row(t, "x", x, "symbolic", sy, d, tag(a));
        add_value_row(t, "x", x, "numeric", nu, d, tag(a));
      }
    }
  write_table(t, o, out, err);
  return t.failed ? kRowErrors : kOk;
}

inline Table demo_table() {
  Table t;
  t.header = {"s", "differint_re", "differint_im", "oracle", "abs_diff"};
  return t;
}

inline void add_demo_row(Table& t, double s, const Sample& v, double oracle) {
  const double d = std::abs(v.value - oracle);
  json row{{"s", s}, {"differint", complex_json(v.value)}, {"oracle", real_json(oracle)}, {"abs_diff", real_json(d)}};
  if (!v.failure.empty()) {
    row["error"] = v.failure;
    t.failed = true;
  }
  t.rows.push_back(std::move(row));
  t.csv.push_back({number(s), number(v.value.real()), number(v.value.imag()), number(oracle), number(d)});
}

inline int cmd_zeta_demo(const Options& o, std::ostream& out, std::ostream& err) {
  QuadratureSpec spec = quadrature_spec(o);
  spec.lower_bound.reset();
  spec.breakpoints.clear();
  const RealFunction bose = as_function(Expr::of(BoseKernel{}));
  Table t = demo_table();
  for (double s : real_list(o.s.empty() ? "2,3,4" : o.s, o.s_range)) {
    double oracle = NAN;
    const Sample v = attempt([&](Sample& r) {
      if (!(s > 1.0)) throw DomainError("zeta demo needs s > 1");
      oracle = special::riemann_zeta(s).real();
      const NumericResult n = differint_numeric(bose, s, 0.0, spec);
      r.value = n.value;
      r.error = n.error_estimate;
    });
    add_demo_row(t, s, v, oracle);
  }
  write_table(t, o, out, err);
  return t.failed ? kRowErrors : kOk;
}

inline int cmd_gamma_demo(const Options& o, std::ostream& out, std::ostream& err) {
  QuadratureSpec spec = quadrature_spec(o);
  spec.lower_bound.reset();
  const RealFunction ex = [](double t) { return Complex(std::exp(t)); };
  Table t = demo_table();
  for (Complex a : alphas(o)) {
    double oracle = NAN;
    const Sample v = attempt([&](Sample& r) {
      if (a.imag() != 0.0 || !(a.real() > 0.0)) throw DomainError("gamma demo needs real alpha > 0");
      oracle = special::gamma(a).real();
      // Gamma(a) S^a e^t at 0 = int_0^inf u^{a-1} e^{-u} du
      r.value = differint_numeric(ex, a, 0.0, spec).value * oracle;
    });
    add_demo_row(t, a.real(), v, oracle);
  }
  write_table(t, o, out, err);
  return t.failed ? kRowErrors : kOk;
}

inline int cmd_transform(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.kind != "laplace" && o.kind != "fourier" && o.kind != "laplace-of-differint")
    throw DomainError("transform kind must be laplace, fourier or laplace-of-differint");
  const Input in = read_input(o.expression);
  QuadratureSpec spec = quadrature_spec(o);
  const auto as = alphas(o);
  const bool sweep = as.size() > 1;
  std::string engine = o.engine;
  if (engine.empty()) engine = in.expr ? "symbolic" : "numeric";
  if (engine != "symbolic" && engine != "numeric" && engine != "both")
    throw DomainError("engine must be symbolic, numeric or both");
  Table t;
  t.header = {"s", "re", "im", "engine", "est_error"};
  if (engine == "both") t.header.push_back("abs_diff");
  if (sweep) t.header.push_back("alpha");
  auto symbolic = [&](Complex a, double s) {
    return attempt([&](Sample& r) {
      if (!in.expr) throw UnsupportedError("no closed form: " + in.closed_form_error);
      if (o.kind == "laplace-of-differint") {
        r.value = laplace_of_differint(*in.expr, a, s);
      } else {
        if (a.imag() != 0.0) throw DomainError("transform order must be real");
        r.value = o.kind == "laplace" ? laplace_frac(*in.expr, a.real(), s) : fourier_differint(*in.expr, a.real(), s);
      }
      r.error = 0.0;
    });
  };
  auto numeric = [&](Complex a, double s) {
    return attempt([&](Sample& r) {
      NumericResult n;
      if (o.kind == "laplace-of-differint") {
        n = laplace_of_differint_numeric(in.function(), a, s, spec);
      } else {
        if (a.imag() != 0.0) throw DomainError("transform order must be real");
        n = o.kind == "laplace" ? laplace_frac_numeric(in.function(), a.real(), s, spec)
                                : fourier_differint_numeric(in.function(), a.real(), s, spec);
      }
      r.value = n.value;
      r.error = n.error_estimate;
      r.warnings = n.warnings;
    });
  };
  const auto tag = [&](Complex a) { return sweep ? std::optional<Complex>(a) : std::nullopt; };
  for (Complex a : as)
    for (double s : real_list(o.s.empty() ? "1" : o.s, o.s_range)) {
      if (engine == "symbolic") {
        add_value_row(t, "s", s, engine, symbolic(a, s), {}, tag(a));
      } else if (engine == "numeric") {
        add_value_row(t, "s", s, engine, numeric(a, s), {}, tag(a));
      } else {
        const Sample sy = symbolic(a, s), nu = numeric(a, s);
        const double d = std::abs(sy.value - nu.value);
        add_value_row(t, "s", s, "symbolic", sy, d, tag(a));
        add_value_row(t, "s", s, "numeric", nu, d, tag(a));
      }
    }
  write_table(t, o, out, err);
  return t.failed ? kRowErrors : kOk;
}

inline std::vector<std::string> fields(const std::string& text, std::size_t n) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != n) throw DomainError("expected " + std::to_string(n) + " colon-separated fields in '" + text + "'");
  return parts;
}

inline int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.rhs.empty()) throw DomainError("solve needs --rhs");
  const Formula rhs = parse_formula(o.rhs);
  const Rhs f = [rhs](double x, Complex y) { return rhs(x, y); };
  std::optional<Expr> rhs_expr;
  if (!rhs.uses_y()) {
    try {
      rhs_expr = to_expr(rhs);
    } catch (const Error&) {
    }
  }
  const double alpha = parse_real(o.alpha);
  Table t;
  t.header = {"x", "re", "im"};
  json extra;
  SampledSolution sol;
  if (!o.boundary.empty()) {
    BoundaryProblem p;
    p.alpha = alpha;
    p.rhs = f;
    p.rhs_expr = rhs_expr;
    p.X = o.X;
    p.h = o.h;
    for (const auto& b : o.boundary)
      for (const auto& item : split_list(b)) {
        const auto parts = fields(item, 3);
        p.conditions.push_back({parse_real(parts[0]), parse_real(parts[1]), parse_constant(parts[2])});
      }
    const BoundarySolution b = solve_boundary(p);
    sol = b.samples;
    json cs = json::array();
    for (Complex c : b.constants) cs.push_back(complex_json(c));
    extra = json{{"constants", cs}, {"residual", b.residual}};
    for (std::size_t k = 0; k < b.constants.size(); ++k)
      err << "c_" << k + 1 << " = " << format_complex(b.constants[k]) << "\n";
  } else {
    FDEProblem p;
    p.alpha = alpha;
    p.rhs = f;
    p.rhs_expr = rhs_expr;
    p.X = o.X;
    p.h = o.h;
    p.lipschitz = o.lipschitz;
    for (const auto& i : o.init)
      for (const auto& item : split_list(i)) {
        const auto parts = fields(item, 2);
        p.initial_data.push_back({parse_real(parts[0]), parse_constant(parts[1])});
      }
    sol = solve_fde(p);
  }
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    t.rows.push_back(json{{"x", sol.x[i]}, {"y", complex_json(sol.y[i])}});
    t.csv.push_back({number(sol.x[i]), number(sol.y[i].real()), number(sol.y[i].imag())});
  }
  if (o.format == "json") {
    json doc{{"ok", true}, {"columns", t.header}, {"rows", t.rows}};
    if (!extra.is_null()) doc.update(extra);
    out << doc.dump(2) << "\n";
    return kOk;
  }
  write_table(t, o, out, err);
  return kOk;
}

inline int cmd_series(const Options& o, std::ostream& out, std::ostream& err) {
  const Expr f = parse_expr(o.expression);
  const double alpha = parse_real(o.alpha);
  const std::vector<double> xs = real_list(o.x, o.x_range);
  const SeriesSolution u = picard_series(f, alpha, o.terms > 0 ? std::size_t(o.terms) : 25, xs);
  Table t;
  t.header = {"x", "re", "im", "engine", "est_error"};
  for (double x : xs) {
    const Sample s = attempt([&](Sample& r) {
      r.value = u(x);
      r.error = u.tail_estimate;
    });
    add_value_row(t, "x", x, "series", s);
  }
  write_table(t, o, out, err);
  return t.failed ? kRowErrors : kOk;
}

inline int cmd_complimentary(const Options& o, std::ostream& out, std::ostream& err) {
  const Expr f = parse_expr(o.expression);
  const ComplimentarySeries c = complimentary_coefficients(f, o.x0, o.terms > 0 ? std::size_t(o.terms) : 15);
  Table t;
  t.header = {"k", "re", "im"};
  for (std::size_t k = 0; k < c.coefficients.size(); ++k) {
    t.rows.push_back(json{{"k", k}, {"c", complex_json(c.coefficients[k])}});
    t.csv.push_back({std::to_string(k), number(c.coefficients[k].real()), number(c.coefficients[k].imag())});
  }
  write_table(t, o, out, err);
  return kOk;
}

inline void report_error(const std::exception& e, const Options& o, std::ostream& out, std::ostream& err) {
  const auto* pe = dynamic_cast<const ParseError*>(&e);
  if (o.format == "json") {
    json error{{"type", error_type(e)}, {"message", e.what()}};
    if (pe) error["column"] = pe->column;
    out << json{{"ok", false}, {"error", error}}.dump(2) << "\n";
    return;
  }
  err << error_type(e) << " error: " << e.what() << "\n";
  if (pe && !o.expression.empty() && pe->column >= 1) {
    err << "  " << o.expression << "\n";
    err << "  " << std::string(pe->column - 1, ' ') << "^\n";
  }
}

// Rewrites "--opt value" as "--opt=value" for value options, so values
// starting with '-' (such as -inf or -y) are not taken for flags.
inline std::vector<std::string> join_values(const std::vector<std::string>& args) {
  static const std::vector<std::string> valued = {
      "--alpha", "--alpha-range", "--lower", "--engine", "--format", "--out", "--window", "--tol", "--nodes", "--x",
      "--x-range", "--s", "--s-range", "--rhs", "--init", "--boundary", "--X", "--step", "--lipschitz", "--terms", "--x0"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i + 1 < args.size() && std::find(valued.begin(), valued.end(), args[i]) != valued.end()) {
      out.push_back(args[i] + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(args[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Runs the command line (args excludes the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Differintegrals of arbitrary order: symbolic rules, quadrature, transforms and solvers"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* c) {
    c->add_option("--alpha", o.alpha, "order (alpha > 0 integrates, alpha < 0 differentiates)");
    c->add_option("--alpha-range", o.alpha_range, "order sweep start:stop:step");
    c->add_option("--lower", o.lower, "lower bound: a number or -inf");
    c->add_option("--engine", o.engine, "symbolic, numeric or both");
    c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--out", o.out, "output file (default stdout)");
    c->add_option("--window", o.window, "truncation window for -inf lower bounds");
    c->add_option("--tol", o.tol, "quadrature tolerance");
    c->add_option("--nodes", o.nodes, "initial Gauss nodes per panel");
    c->add_option("--x", o.x, "comma-separated evaluation points");
    c->add_option("--x-range", o.x_range, "evaluation points start:stop:step");
  };

  auto* diff = app.add_subcommand("diff", "closed-form differintegral");
  diff->add_option("expression", o.expression)->required();
  diff->add_flag("--table", o.table, "emit a value table at --x instead of the formula");
  common(diff);

  auto* eval = app.add_subcommand("eval", "differintegral values at points");
  eval->add_option("expression", o.expression)->required();
  common(eval);

  auto* zeta = app.add_subcommand("zeta-demo", "S^s of the Bose kernel at 0 against zeta(s)");
  zeta->add_option("--s", o.s, "comma-separated orders");
  zeta->add_option("--s-range", o.s_range, "orders start:stop:step");
  common(zeta);

  auto* gamma = app.add_subcommand("gamma-demo", "Gamma(alpha) S^alpha e^t at 0 against Gamma(alpha)");
  common(gamma);

  auto* transform = app.add_subcommand("transform", "fractional Laplace and Fourier transforms");
  transform->add_option("kind", o.kind, "laplace, fourier or laplace-of-differint")->required();
  transform->add_option("expression", o.expression)->required();
  transform->add_option("--s", o.s, "comma-separated s (or omega) values");
  transform->add_option("--s-range", o.s_range, "s values start:stop:step");
  common(transform);

  auto* solve = app.add_subcommand("solve", "fractional differintegral equation y^(alpha) = f(x, y)");
  solve->add_option("--rhs", o.rhs, "right-hand side f(x, y)")->required();
  solve->add_option("--init", o.init, "initial data order:value (repeatable, comma-separated)");
  solve->add_option("--boundary", o.boundary, "boundary conditions order:at:value (repeatable)");
  solve->add_option("--X", o.X, "domain length");
  solve->add_option("--step", o.h, "grid step");
  solve->add_option("--lipschitz", o.lipschitz, "declared Lipschitz constant of f in y");
  common(solve);

  auto* series = app.add_subcommand("series", "Picard series sum_j S^{j alpha} f");
  series->add_option("expression", o.expression)->required();
  series->add_option("--terms", o.terms, "number of terms (default 25)");
  common(series);

  auto* compl_ = app.add_subcommand("complimentary", "complimentary-series coefficients at a lower bound");
  compl_->add_option("expression", o.expression)->required();
  compl_->add_option("--x0", o.x0, "lower bound");
  compl_->add_option("--terms", o.terms, "number of coefficients (default 15)");
  common(compl_);

  std::vector<std::string> joined = detail::join_values(args);
  std::vector<std::string> reversed(joined.rbegin(), joined.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) {
      err << "cannot open " << o.out << " for writing\n";
      return kUsage;
    }
  }
  std::ostream& sink = o.out.empty() ? out : file;
  try {
    if (*diff) return detail::cmd_diff(o, sink, err);
    if (*eval) return detail::cmd_eval(o, sink, err);
    if (*zeta) return detail::cmd_zeta_demo(o, sink, err);
    if (*gamma) return detail::cmd_gamma_demo(o, sink, err);
    if (*transform) return detail::cmd_transform(o, sink, err);
    if (*solve) return detail::cmd_solve(o, sink, err);
    if (*series) return detail::cmd_series(o, sink, err);
    if (*compl_) return detail::cmd_complimentary(o, sink, err);
  } catch (const std::exception& e) {
    detail::report_error(e, o, sink, err);
    return kUsage;
  }
  return kUsage;
}

}  // namespace fracdd::cli
