#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "liesym/casebook.hpp"
#include "liesym/conslaw.hpp"
#include "liesym/gcs.hpp"

using namespace liesym;
using liesym::test::E;
using liesym::test::P;

namespace {

const Casebook& book() {
  static const Casebook cb = Casebook::load(default_casebook_path());
  return cb;
}

Expr Q(const std::string& s) { return parse(s, book().context()); }

ConservedVector law(const std::string& id) {
  const CLRecord* r = book().find_law(id);
  REQUIRE(r);
  return r->cv;
}

}  // namespace

TEST_CASE("characteristics of the basic laws") {
  EquationSpec generic = E("f(x)", "H(u)", "K(u)");
  Characteristic c = characteristic(generic, instantiate(law("CL1"), generic));
  CHECK(c.lambda == Expr(1));
  CHECK(c.remainder.zero());
  c = characteristic(generic, instantiate(law("CL2"), generic));
  CHECK(c.lambda == P("t"));

  EquationSpec row5 = E("x^(-1)", "H(u)", "1");
  c = characteristic(row5, instantiate(law("CL9"), row5));
  CHECK(c.lambda == P("x*sin(t)"));
  CHECK(c.remainder.grade == Grade::SymbolicZero);
}

TEST_CASE("element bindings give antiderivatives") {
  for (const char* K : {"2", "0"}) {
    EquationSpec eq = E("1", "H(u)", K);
    Bindings b = element_bindings(eq);
    INFO(std::string(K));
    CHECK(diff(substitute(Q("IK(u)"), b), Var::u) == eq.K);
    CHECK(diff(substitute(Q("IH(u)"), b), Var::u) == eq.H);
  }
  CHECK(substitute(Q("IK(u)"), element_bindings(E("1", "H(u)", "0"))).is_zero());
  CHECK(substitute(Q("IK(u)"), element_bindings(E("1", "H(u)", "H(u)+3"))) == Q("IH(u)+3*u"));
  CHECK_THROWS(element_bindings(E("1", "exp(u)", "exp(u)+3")));
}

TEST_CASE("divergence is linear and trivial vectors are conserved") {
  EquationSpec eq = E("f(x)", "H(u)", "0");
  ConservedVector a = instantiate(law("CL1"), eq), b = instantiate(law("CL3"), eq);
  ConservedVector sum{a.T * Expr(3) + b.T * Expr(-2), a.X * Expr(3) + b.X * Expr(-2)};
  CHECK(divergence(eq, sum) == Expr(3) * divergence(eq, a) - Expr(2) * divergence(eq, b));
  CHECK(verify_divergence(eq, sum).grade == Grade::SymbolicZero);

  const char* potentials[] = {"exp(u)*t", "sin(x*u)", "u*t^2", "ln(u)*x"};
  for (const char* s : potentials) {
    Expr phi = P(s);
    ConservedVector trivial{total_derivative(phi, Dir::x), -total_derivative(phi, Dir::t)};
    CHECK(divergence(eq, trivial).is_zero());
  }
}

TEST_CASE("printed fluxes of corrected laws fail") {
  EquationSpec row7 = E("(1+c*exp(-x))^(-1)", "H(u)", "H(u)-k^2", {"k != 0"});
  CHECK(verify_divergence(row7, instantiate(law("CL13"), row7)).zero());
  ConservedVector printed = book().printed_law("CL13").cv;
  CHECK(verify_divergence(row7, instantiate(printed, row7)).grade == Grade::NonZero);
}

TEST_CASE("generalized conditional symmetry system") {
  CHECK(gcs_system_verdict(Q("exp(alpha*u)"), Q("c*exp(alpha*u)"), Expr(0), {parse_constraint("alpha != 0")}).zero());
  CHECK(gcs_system_verdict(P("(exp(u)-1)^(-1)"), Expr(0), P("1/(1-exp(u))")).zero());
  CHECK(gcs_system_verdict(P("exp(u)"), Expr(0), Expr(1)).grade == Grade::NonZero);
  for (const auto& r : gcs_system_residuals(P("exp(u)"), P("exp(u)"), Expr(0))) CHECK(r.is_zero());
}

TEST_CASE("full and reduced GCS tests agree") {
  for (const GcsRecord& r : book().gcs) {
    INFO(r.id);
    EquationSpec eq{r.id, Expr(1), r.H, r.K, r.constraints};
    CHECK(gcs_system_verdict(r.H, r.K, r.g, r.constraints).zero());
    CHECK(gcs_full_residual(eq, r.g).zero());
  }
  std::mt19937_64 rng(99);
  for (int i = 0; i < 5; ++i) {
    const GcsRecord& r = book().gcs[rng() % book().gcs.size()];
    Expr g = r.g + Expr(static_cast<long>(rng() % 5) + 1) * P("u");
    EquationSpec eq{r.id, Expr(1), r.H, r.K, r.constraints};
    INFO(r.id);
    CHECK(gcs_system_verdict(r.H, r.K, g, r.constraints).grade == Grade::NonZero);
    CHECK(gcs_full_residual(eq, g).grade == Grade::NonZero);
  }
}

TEST_CASE("separated solution for H = exp(u), K = 0") {
  for (const SolutionRecord& s : book().solutions) {
    if (s.solution.form != Solution::Form::Separated || s.id != "S.GA") continue;
    CHECK(verify_separation(s.eq, s.solution.separation).zero());
    CHECK(separation_consistency(s.solution.separation, s.solution.constraints).zero());
  }
}
