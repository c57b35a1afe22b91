#include "doctest.h"
#include "helpers.hpp"
#include "liesym/casebook.hpp"
#include "liesym/reduction.hpp"

using namespace liesym;
using liesym::test::E;
using liesym::test::V;

namespace {

const Casebook& book() {
  static const Casebook cb = Casebook::load(default_casebook_path());
  return cb;
}

Expr Q(const std::string& s) { return parse(s, book().context()); }

Ansatz ansatz(const VectorField& gen, const char* u, const char* omega) { return {gen, Q(u), Q(omega)}; }

}  // namespace

TEST_CASE("invariant ansatz consistency") {
  CHECK(ansatz_invariance_residual(ansatz(V("1", "0", "0"), "phi(omega)", "x")).is_zero());
  CHECK(ansatz_invariance_residual(ansatz(V("t", "0", "-2"), "phi(omega)-2*ln(abs(t))", "x")).is_zero());
  CHECK_FALSE(ansatz_invariance_residual(ansatz(V("t", "0", "-1"), "phi(omega)-2*ln(abs(t))", "x")).is_zero());
  CHECK(ansatz_invariance_residual(ansatz(V("t", "x", "0"), "phi(omega)", "x/t")).is_zero());
}

TEST_CASE("reductions of u_tt = (exp(u)u_x)_x") {
  EquationSpec eq = E("1", "exp(u)", "0");
  CHECK(reduce(eq, ansatz(V("1", "0", "0"), "phi(omega)", "x")) == Q("phi''(omega)+phi'(omega)^2"));
  CHECK(reduce(eq, ansatz(V("0", "1", "0"), "phi(omega)", "t")) == Q("phi''(omega)"));
  CHECK(reduce(eq, ansatz(V("0", "x", "2"), "phi(omega)+2*ln(abs(x))", "t")) == Q("phi''(omega)-2*exp(phi(omega))"));

  ReductionMatch m = check_reduction(eq, ansatz(V("t", "0", "-2"), "phi(omega)-2*ln(abs(t))", "x"),
                                     Q("exp(phi(omega))*(phi''(omega)+phi'(omega)^2)-2"));
  CHECK(m.matches);
  CHECK(m.ratio == Q("-1/t^2"));

  m = check_reduction(eq, ansatz(V("0", "x", "2"), "phi(omega)+2*ln(abs(x))", "t"),
                      Q("exp(phi(omega))*(phi''(omega)+phi'(omega)^2)-2*exp(phi(omega))"));
  CHECK_FALSE(m.matches);
}

TEST_CASE("scaling reduction depends on omega alone") {
  EquationSpec eq = E("1", "u^2", "0");
  Expr ode = reduce(eq, ansatz(V("t", "x", "0"), "phi(omega)", "x/t"));
  CHECK_FALSE(depends_on(ode, var_gen(Var::t)));
  CHECK_FALSE(depends_on(ode, var_gen(Var::x)));
  CHECK_THROWS(reduce(eq, ansatz(V("1", "0", "0"), "phi(omega)", "x*t")));
}

TEST_CASE("solution forms") {
  EquationSpec eq = E("1", "exp(u)", "0");
  Solution s;
  s.u = Q("ln(abs(c1*x+c0))");
  CHECK(verify_solution(eq, s).grade == Grade::SymbolicZero);
  s.u = Q("ln(x^2/(4*c0^2*cos((t+c1)/(2*c0))^2))");
  CHECK(verify_solution(eq, s).zero());
  s.u = Q("ln(1/(4*c0^2*cosh((t+c1)/(2*c0))^2)+x^2)");
  CHECK(verify_solution(eq, s).grade == Grade::NonZero);

  Solution imp;
  imp.form = Solution::Form::Implicit;
  imp.relation = Q("exp(u)-u-c1*(x-t)-c0");
  CHECK(verify_solution(eq, imp).zero());
  imp.relation = Q("exp(u)-2*u-c1*(x-t)-c0");
  CHECK(verify_solution(eq, imp).grade == Grade::NonZero);

  Solution lin;
  lin.u = Q("c1*t+c0");
  CHECK(verify_solution(E("f(x)", "H(u)", "K(u)"), lin).grade == Grade::SymbolicZero);
  CHECK(std::string(form_name(Solution::Form::Quadrature)) == "quadrature");
}

TEST_CASE("corrected reductions and their printed forms") {
  for (const AnsatzRecord& a : book().ansatze) {
    if (!a.annotation.corrected()) continue;
    INFO(a.id);
    CHECK(check_reduction(a.eq, a.ansatz, a.ode, a.constraints).matches);
    AnsatzRecord p = book().printed_ansatz(a.id);
    bool printed_ok = ansatz_invariance_residual(p.ansatz).is_zero() &&
                      check_reduction(p.eq, p.ansatz, p.ode, p.constraints).matches;
    CHECK_FALSE(printed_ok);
  }
}
