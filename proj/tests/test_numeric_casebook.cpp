#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "liesym/casebook.hpp"
#include "liesym/function.hpp"

using namespace liesym;
using liesym::test::P;

namespace {

std::string bundled_text() {
  std::ifstream in(default_casebook_path());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Casebook& book() {
  static const Casebook cb = Casebook::load(default_casebook_path());
  return cb;
}

}  // namespace

TEST_CASE("evaluation at a point") {
  Assignment a;
  a.values[var_gen(Var::x)] = 0;
  CHECK(eval(P("exp(x)"), a) == 1);
  a.values[var_gen(Var::x)] = 2;
  CHECK(abs(eval(P("x^3 - 1/x"), a) - Real(15) / 2) < Real(1e-40));
  CHECK_THROWS_AS(eval(P("1/(x-2)"), a), SingularPoint);
}

TEST_CASE("log-derivative functions integrate consistently") {
  FunctionRef F = make_log_derivative("F", Var::x, P("1/(1+x)"), 0);
  Assignment a;
  Real coarse = integrate_log_derivative(*F, Real(1), a, 200);
  Real fine = integrate_log_derivative(*F, Real(1), a, 400);
  CHECK(abs(coarse - fine) < Real(1e-10));
  CHECK(abs(fine - log(Real(2))) < Real(1e-10));
  CHECK(abs(integrate_log_derivative(*F, Real(1), a) - log(Real(2))) < Real(1e-12));
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  SampleDomain dom;
  dom.seed = 42;
  dom.intervals["u_x"] = {1, 2};
  ZeroVerdict v1 = is_zero(P("u_x"), ZeroMode::Numeric, dom);
  ZeroVerdict v2 = is_zero(P("u_x"), ZeroMode::Numeric, dom);
  CHECK(v1.grade == Grade::NonZero);
  CHECK_FALSE(v1.witness.empty());
  CHECK(v1.witness == v2.witness);
  CHECK(v1.max_residual == v2.max_residual);

  ZeroVerdict z = is_zero(P("sin(x)^2 + cos(x)^2 - 1"), ZeroMode::Numeric, dom);
  CHECK(z.grade == Grade::NumericZero);
  CHECK(is_zero(P("sin(x)^2 + cos(x)^2 - 1")).zero());
}

TEST_CASE("constraints") {
  ParamConstraint c = parse_constraint("mu != -4");
  CHECK(c.holds(Rational(1)));
  CHECK_FALSE(c.holds(Rational(-4)));
  c = parse_constraint("eps in {-1, 1}");
  CHECK(c.holds(Rational(-1)));
  CHECK_FALSE(c.holds(Rational(0)));
  CHECK_THROWS(parse_constraint("mu ~ 3"));
}

TEST_CASE("bundled casebook") {
  const Casebook& cb = book();
  CasebookCounts n = cb.counts();
  std::set<int> tables;
  for (const ClassCase& c : cb.cases) tables.insert(c.table);
  CHECK(tables == std::set<int>{1, 2, 3, 4});
  CHECK(n.conditional == 5);
  CHECK(n.ansatze == 16);
  CHECK(n.solutions >= 25);
  CHECK(n.laws == 16);
  CHECK(n.cl_rows == 8);
  CHECK(cb.serialize() == bundled_text());
  Casebook again = Casebook::from_text(cb.serialize());
  CHECK(again.serialize() == cb.serialize());
}

TEST_CASE("casebook errors") {
  const std::string head = "casebook-v1\n\n";
  CHECK_THROWS_AS(Casebook::from_text(head + "[case X.1]\ntable: 1\nrow: 1\nf: 1\nH: H(u)\nK: 0\ngen: t*d_t + u\n"),
                  CasebookError);
  CHECK_THROWS_AS(Casebook::from_text(head + "[ansatz R.X]\ncase: T9.C1\ngen: d_t\nu: phi(omega)\nomega: x\node: 0\n"),
                  CasebookError);
  CHECK_THROWS_AS(
      Casebook::from_text(head + "[case X.1]\ntable: 1\nrow: 1\nf: 1\nH: u^mu\nK: 0\nconstraint: mu = 2\n"
                                 "constraint: mu != 2\ngen: d_t\n"),
      CasebookError);
  CHECK_THROWS_AS(Casebook::from_text("casebook-v2\n"), CasebookError);
  CHECK_THROWS_AS(Casebook::load("/nonexistent/casebook.txt"), CasebookError);
}

TEST_CASE("lookup by elements") {
  auto ids = [](const std::vector<Casebook::Match>& ms) {
    std::set<std::string> out;
    for (const auto& m : ms) out.insert(m.c->id);
    return out;
  };
  std::set<std::string> exp_case = ids(book().lookup(P("1"), P("exp(u)"), P("0")));
  CHECK(exp_case.count("T1.C5"));
  std::set<std::string> power = ids(book().lookup(P("1"), P("u^(-4)"), P("0")));
  CHECK(power.count("T1.C10"));
  CHECK(book().lookup(P("x"), P("u"), P("u^2")).empty());
}

TEST_CASE("printed variants of corrected records") {
  int corrected = 0;
  for (const SolutionRecord& s : book().solutions) {
    if (!s.annotation.corrected()) continue;
    ++corrected;
    INFO(s.id);
    CHECK(verify_solution(s.eq, s.solution).zero());
    SolutionRecord p = book().printed_solution(s.id);
    ZeroVerdict v;
    try {
      v = verify_solution(p.eq, p.solution);
    } catch (const Error&) {
      v.grade = Grade::NonZero;
    }
    CHECK(v.grade == Grade::NonZero);
  }
  CHECK(corrected >= 5);
  for (const GcsRecord& g : book().gcs) {
    if (!g.annotation.corrected()) continue;
    GcsRecord p = book().printed_gcs(g.id);
    REQUIRE(p.q);
    CHECK_FALSE((diff(*p.q, Var::u) * p.g - diff(*p.q, Var::u, 2)).is_zero());
  }
  CHECK_THROWS_AS(book().printed_solution("S.E1"), CasebookError);
}
