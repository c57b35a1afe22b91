#include "doctest.h"
#include "helpers.hpp"
#include "liesym/casebook.hpp"
#include "liesym/conslaw.hpp"
#include "liesym/transform.hpp"

using namespace liesym;
using liesym::test::E;
using liesym::test::P;
using liesym::test::V;

namespace {

PointTransformation map(const char* t, const char* x, const char* u, const char* it, const char* ix, const char* iu) {
  PointTransformation T;
  T.t_new = P(t);
  T.x_new = P(x);
  T.u_new = P(u);
  T.inverse = std::array<Expr, 3>{P(it), P(ix), P(iu)};
  return T;
}

std::array<Expr, 7> eps(std::initializer_list<long> v) {
  std::array<Expr, 7> out;
  std::size_t i = 0;
  for (long e : v) out[i++] = Expr(e);
  return out;
}

}  // namespace

TEST_CASE("identity map is an equivalence with unit multiplier") {
  EquationSpec eq = E("f(x)", "H(u)", "K(u)");
  EquivalenceResult r = verify_equivalence(eq, eq, PointTransformation::identity());
  CHECK(r.holds);
  CHECK(r.verdict.grade == Grade::SymbolicZero);
  CHECK(r.multiplier == Expr(1));
}

TEST_CASE("equivalence group action") {
  EquationSpec eq = E("exp(x)", "u^2", "u");
  GroupAction g = apply_equivalence_group(eq, eps({0, 0, 0, 1, 2, 1, 1}));
  CHECK(g.image.K == P("u/2"));
  CHECK(g.image.f == P("exp(x/2)/4"));
  CHECK(g.image.H == P("u^2"));
  EquivalenceResult r = verify_equivalence(eq, g.image, g.map);
  CHECK(r.holds);
  CHECK(r.verdict.grade == Grade::SymbolicZero);

  g = apply_equivalence_group(eq, eps({1, -2, 3, 2, 3, 5, 7}));
  CHECK(verify_equivalence(eq, g.image, g.map).holds);
  CHECK_THROWS(apply_equivalence_group(eq, eps({0, 0, 0, 0, 1, 1, 1})));

  EquationSpec wrong = g.image;
  wrong.K = wrong.K * Expr(2);
  CHECK_FALSE(verify_equivalence(eq, wrong, g.map).holds);
}

TEST_CASE("hodograph transformation of the wave subclass") {
  HodographResult h = hodograph_wave_transform(E("1", "exp(u)", "0"));
  REQUIRE(h.target_H);
  CHECK(*h.target_H == P("1/u"));

  h = hodograph_wave_transform(E("1", "u^(-2)", "0"));
  REQUIRE(h.exponent);
  CHECK(*h.exponent == Expr(-2));

  h = hodograph_wave_transform(E("1", "u^(-4)", "0"));
  REQUIRE(h.exponent);
  Rational q(-4, 3);
  CHECK(*h.exponent == Expr(q));

  h = hodograph_wave_transform(E("1", "u^mu", "0", {"mu != -1"}));
  REQUIRE(h.exponent);
  CHECK(*h.exponent == P("-mu/(mu+1)"));

  CHECK_THROWS(hodograph_wave_transform(E("1", "exp(u)", "exp(u)")));
}

TEST_CASE("push-forward of generators") {
  PointTransformation T = map("t", "exp(x)", "u", "t", "ln(x)", "u");
  CHECK(push_forward(V("0", "1", "0"), T) == V("0", "x", "0"));
  CHECK(push_forward(V("1", "0", "0"), T) == V("1", "0", "0"));
  PointTransformation inv = inverse_of(T);
  CHECK(inv.t_new == P("t"));
  CHECK(inv.x_new == P("ln(x)"));
  CHECK(push_forward(push_forward(V("t", "x", "u"), T), inv) == V("t", "x", "u"));

  // x -> 1/x inversion on the u^(-4/3) wave equation.
  EquationSpec eq = E("1", "u^(-4/3)", "0");
  PointTransformation I = map("t", "1/x", "x^3*u", "t", "1/x", "x^3*u");
  EquivalenceResult r = verify_equivalence(eq, eq, I);
  CHECK(r.holds);
}

TEST_CASE("conserved vectors follow point transformations") {
  EquationSpec src = E("1", "exp(u)", "0");
  HodographResult h = hodograph_wave_transform(src);
  REQUIRE(h.target_H);
  EquationSpec tgt = E("1", "1/u", "0");
  ConservedVector cl1 = instantiate({P("f(x)*u_t"), P("-(H(u)*u_x+IK(u))")}, src);
  CHECK(verify_divergence(src, cl1).zero());
  ConservedVector moved = transform_conserved_vector(cl1, h.map);
  CHECK(verify_divergence(tgt, moved).zero());
}
