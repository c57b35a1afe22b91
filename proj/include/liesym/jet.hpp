// Jet-space calculus: total derivatives and prolongations.
#pragma once

#include <string>

#include "liesym/expr.hpp"

namespace liesym {

enum class Dir { t, x };

struct VectorField {
  Expr tau, xi, eta;
};

struct EvolutionaryField {
  Expr eta;
};

struct ProlongedField {
  Expr eta_t, eta_x, eta_tt, eta_tx, eta_xx;
};

// Throws if a jet above max_order would be produced.
Expr total_derivative(const Expr& e, Dir d, int max_order = 3);
Expr total_derivative(const Expr& e, int nt, int nx, int max_order = 3);

// Characteristic W = eta - tau*u_t - xi*u_x.
Expr characteristic(const VectorField& q);
ProlongedField prolong2(const VectorField& q);

// pr^(2) Q applied to e (jet order <= 2).
Expr apply_prolonged(const VectorField& q, const Expr& e);
Expr apply_prolonged(const VectorField& q, const ProlongedField& p, const Expr& e);

// pr V applied to e for an evolutionary field; max_order bounds the jets of D_J eta.
Expr apply_evolutionary(const EvolutionaryField& v, const Expr& e, int max_order = 4);

// e with u replaced by an explicit function u(t, x) and each jet u_{t^i x^j}
// by the corresponding partial derivative.
Expr substitute_jets(const Expr& e, const Expr& u);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& c, const VectorField& a);
bool operator==(const VectorField& a, const VectorField& b);

// "tau*d_t + xi*d_x + eta*d_u" style rendering, zero components omitted.
std::string to_string(const VectorField& q);

}  // namespace liesym
