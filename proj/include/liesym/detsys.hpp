// Invariance residuals and determining systems for f(x)u_tt = (H(u)u_x)_x + K(u)u_x.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/jet.hpp"
#include "liesym/numeric.hpp"
#include "liesym/zero.hpp"

namespace liesym {

struct EquationSpec {
  std::string id;
  Expr f, H, K;  // f in x; H and K in u
  std::vector<ParamConstraint> constraints;

  // Throws unless f*H != 0, (H_u, K_u) != (0, 0) and the variable dependence is right.
  void validate() const;
};

// f, H, K opaque.
EquationSpec generic_equation();

Expr delta(const EquationSpec& eq);
Expr solved_utt(const EquationSpec& eq);
// Replaces u_ttt, u_ttx and u_tt by the solved form and its total derivatives.
Expr eliminate_utt(const EquationSpec& eq, const Expr& e);

// Positive chart for t, x, u plus the equation's parameter constraints.
SampleDomain sample_domain(const EquationSpec& eq);

Expr invariance_residual(const EquationSpec& eq, const VectorField& q);
ZeroVerdict check_symmetry(const EquationSpec& eq, const VectorField& q, ZeroMode mode = ZeroMode::Auto);

struct DeterminingSystem {
  std::vector<Expr> equations;
  std::vector<std::string> monomials;  // jet monomial each equation was split from
};

// tau(t,x,u), xi(t,x,u), eta(t,x,u).
VectorField generic_field();
bool is_unknown(GenRef g);  // a derivative of tau, xi or eta

DeterminingSystem split_residual(const Expr& residual);
DeterminingSystem derive_determining_system(const EquationSpec& eq);

// Divides by the coefficient of the leading unknown so equal equations compare equal.
Expr normalize_equation(const Expr& e);

// Equations free of arbitrary elements after normalization.
std::vector<Expr> non_classifying(const DeterminingSystem& sys);

// tau = T(t), xi = X(x), eta = (T'(t)/2 + A(x))u + E(t,x).
Bindings integrated_ansatz();
ZeroVerdict verify_integrated_form(const DeterminingSystem& sys, const Bindings& ansatz = integrated_ansatz());

// Linear span comparison over the field of coefficient functions, with
// partial derivatives up to the given order added to both sides.
struct SpanReport {
  bool equivalent = false;
  int rank_a = 0, rank_b = 0;
  std::vector<int> a_outside_b, b_outside_a;  // indices of unreproduced equations
};
SpanReport compare_systems(const std::vector<Expr>& a, const std::vector<Expr>& b, int closure = 2);

// Point symmetries among fields whose coefficients are polynomials of degree
// <= 2 in (t, x, u), found as an exact nullspace over Q after splitting with
// respect to every symbol of the equation.
struct KernelResult {
  std::vector<VectorField> basis;
  int candidates = 0;
  int equations = 0;
};
KernelResult kernel_candidates(const EquationSpec& eq);

// Equivalence-algebra operators on the extended space (t, x, u, f, H, K).
// Element coordinates are the symbols f, H, K with derivatives f_x, H_u, K_u.
struct ExtendedField {
  Expr tau, xi, eta, pi, rho, phi;
};

// Class restriction for conditional equivalence: H and K may be fixed
// functions of u, and K may be tied to H.
struct ExtendedClass {
  std::optional<Expr> H, K;
  bool K_equals_H = false;
  std::string label;
};

Expr element_f();
Expr element_H();
Expr element_K();

std::vector<Expr> extended_invariance_residual(const ExtendedField& X, const ExtendedClass& cls = {});

std::string to_string(const ExtendedField& X);

}  // namespace liesym
