// Point and equivalence transformations of the class.
#pragma once

#include <array>
#include <optional>
#include <string>

#include "liesym/detsys.hpp"

namespace liesym {

// New variables as expressions in the old ones. The optional element maps
// give f~(x~), H~(u~), K~(u~) already composed with the transformation, as
// expressions in (t, x, u); without them the target equation's own f, H, K
// are evaluated at x~ and u~.
struct PointTransformation {
  Expr t_new, x_new, u_new;
  std::optional<Expr> f_new, H_new, K_new;
  // Old variables as expressions in the new ones, written with t, x, u.
  std::optional<std::array<Expr, 3>> inverse;
  std::string chart;

  static PointTransformation identity();
};

// First-order total derivative operators of the new variables, expressed
// through D_t and D_x of the old ones.
struct Pullback {
  Expr Dt_t, Dt_x, Dx_t, Dx_x, det;
  Expr d_t(const Expr& e) const;  // D_t~ e
  Expr d_x(const Expr& e) const;  // D_x~ e
};
Pullback pullback(const PointTransformation& T);

// Delta_tgt written in old variables through T.
Expr pull_back_equation(const EquationSpec& tgt, const PointTransformation& T);

struct EquivalenceResult {
  bool holds = false;
  Expr multiplier;        // lambda with Delta_tgt o T = lambda * Delta_src
  Expr f_scale = Expr(1);  // constant rescaling of f~ needed when f~ is known only up to a factor
  ZeroVerdict verdict;
  std::string note;
};
EquivalenceResult verify_equivalence(const EquationSpec& src, const EquationSpec& tgt, const PointTransformation& T);

// Group element with parameters eps[0..6] = epsilon_1..epsilon_7.
struct GroupAction {
  EquationSpec image;
  PointTransformation map;
};
GroupAction apply_equivalence_group(const EquationSpec& eq, const std::array<Expr, 7>& eps);

// t~ = x, x~ = t, u~ = int H du for K = 0. H~(u~) is the derivative of the
// inverse of u -> u~; target_H is set when that inverse is explicit.
struct HodographResult {
  PointTransformation map;
  EquationSpec target;
  std::optional<Expr> target_H;
  std::optional<Expr> exponent;  // power law H ~ u^p maps to u~^(-p/(p+1))
};
HodographResult hodograph_wave_transform(const EquationSpec& eq);

// Symmetry pushed forward to the new variables; requires T.inverse.
VectorField push_forward(const VectorField& q, const PointTransformation& T);

// Old-variable expression rewritten in new variables through T.inverse,
// including first-order jets.
Expr to_new_variables(const Expr& e, const PointTransformation& T);

// Expression in new variables (written with t, x, u) composed with T, giving
// an expression in the old ones.
Expr in_old_variables(const Expr& e, const PointTransformation& T);

PointTransformation inverse_of(const PointTransformation& T);

// Density/flux pair of a conservation law D_t T + D_x X = 0.
struct ConservedVector {
  Expr T, X;
};

// (T^g, X^g) = ((T D_t t~ + X D_x t~)/J, (T D_t x~ + X D_x x~)/J) with
// J = D_t t~ D_x x~ - D_x t~ D_t x~; rewritten in new variables when T.inverse is set.
ConservedVector transform_conserved_vector(const ConservedVector& cv, const PointTransformation& T);

}  // namespace liesym
