#include "liesym/conslaw.hpp"

#include "liesym/function.hpp"

namespace liesym {

namespace {

bool is_symbol(const Expr& e, const char* name) {
  GenRef g = e.as_gen();
  if (!g || g->kind != GenKind::Func || g->fn->name != name) return false;
  for (int d : g->deriv)
    if (d) return false;
  return true;
}

void check_jet_order(const ConservedVector& cv) {
  if (max_jet_order(cv.T) > 1 || max_jet_order(cv.X) > 1)
    throw Error("conserved vector components must have jet order at most 1");
}

}  // namespace

Bindings element_bindings(const EquationSpec& eq) {
  Bindings b;
  Expr u = var(Var::u);
  if (!is_symbol(eq.f, "f")) b.bind_function("f", {Var::x}, eq.f);
  bool generic_H = is_symbol(eq.H, "H");
  if (!generic_H) b.bind_function("H", {Var::u}, eq.H);
  if (!is_symbol(eq.K, "K")) {
    b.bind_function("K", {Var::u}, eq.K);
    Expr shift = eq.K - eq.H;
    GenRef ug = var_gen(Var::u);
    if (eq.K.is_zero()) {
      b.bind_function("IK", {Var::u}, Expr(0));
    } else if (!depends_on(eq.K, ug)) {
      b.bind_function("IK", {Var::u}, eq.K * u);
    } else if (generic_H && !depends_on(shift, ug)) {
      b.bind_function("IK", {Var::u}, func(std_function("IH"), {u}) + shift * u);
    } else {
      b.bind_function("IK", {Var::u}, func(std_function("IK"), {u}));
      if (!generic_H) throw Error("no antiderivative available for K = " + to_string(eq.K));
    }
  }
  return b;
}

ConservedVector instantiate(const ConservedVector& cv, const EquationSpec& eq) {
  check_jet_order(cv);
  Bindings b = element_bindings(eq);
  bool uses_IH = false;
  for (const Expr* e : {&cv.T, &cv.X})
    for (GenRef g : leaves(*e))
      if (g->kind == GenKind::Func && g->fn->name == "IH") uses_IH = true;
  if (uses_IH && !is_symbol(eq.H, "H")) throw Error("IH requires an arbitrary H");
  return {substitute(cv.T, b), substitute(cv.X, b)};
}

Expr divergence(const EquationSpec& eq, const ConservedVector& cv) {
  ConservedVector c = instantiate(cv, eq);
  return total_derivative(c.T, Dir::t) + total_derivative(c.X, Dir::x);
}

Expr divergence_residual(const EquationSpec& eq, const ConservedVector& cv) {
  return eliminate_utt(eq, divergence(eq, cv));
}

ZeroVerdict verify_divergence(const EquationSpec& eq, const ConservedVector& cv) {
  return is_zero(divergence_residual(eq, cv), ZeroMode::Auto, sample_domain(eq));
}

Characteristic characteristic(const EquationSpec& eq, const ConservedVector& cv) {
  Expr D = divergence(eq, cv);
  Expr L = delta(eq);
  GenRef utt = jet_gen(2, 0);
  Characteristic c;
  c.lambda = diff(D, utt) / diff(L, utt);
  if (max_jet_order(c.lambda) > 0) throw Error("characteristic depends on derivatives: " + to_string(c.lambda));
  c.remainder = is_zero(D - c.lambda * L, ZeroMode::Auto, sample_domain(eq));
  if (!c.remainder.zero()) throw Error("no order-zero characteristic: remainder does not vanish");
  return c;
}

}  // namespace liesym
