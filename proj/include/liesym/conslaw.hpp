// Conserved vectors with characteristics of order zero.
#pragma once

#include <string>

#include "liesym/detsys.hpp"
#include "liesym/transform.hpp"

namespace liesym {

// Bindings of f, H, K, IH, IK to the equation's elements. IK is taken as
// IH + (K - H)u when K - H is constant, K*u for constant K and 0 for K = 0.
// Throws if an antiderivative is needed but cannot be expressed.
Bindings element_bindings(const EquationSpec& eq);
ConservedVector instantiate(const ConservedVector& cv, const EquationSpec& eq);

// D_t T + D_x X with the elements bound, before elimination.
Expr divergence(const EquationSpec& eq, const ConservedVector& cv);
// The same with u_tt eliminated through the solved equation.
Expr divergence_residual(const EquationSpec& eq, const ConservedVector& cv);
ZeroVerdict verify_divergence(const EquationSpec& eq, const ConservedVector& cv);

struct Characteristic {
  Expr lambda;
  ZeroVerdict remainder;  // D_t T + D_x X - lambda*Delta
};

// Division of D_t T + D_x X by Delta in u_tt. Throws if lambda involves jets
// or the remainder does not vanish.
Characteristic characteristic(const EquationSpec& eq, const ConservedVector& cv);

}  // namespace liesym
