// Generalized conditional symmetry V = (u_tx + g(u) u_x u_t) d_u and
// functionally separable solutions of u_tt = (H(u)u_x)_x + K(u)u_x.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liesym/detsys.hpp"

namespace liesym {

// Five-equation determining system for (H, K, g), each residual in u.
std::array<Expr, 5> gcs_system_residuals(const Expr& H, const Expr& K, const Expr& g);
ZeroVerdict gcs_system_verdict(const Expr& H, const Expr& K, const Expr& g,
                               const std::vector<ParamConstraint>& constraints = {});

// pr V applied to the equation and restricted to the equation together with
// u_tx = -g u_x u_t and their differential consequences. Requires f = 1.
Expr gcs_full_expression(const EquationSpec& eq, const Expr& g);
ZeroVerdict gcs_full_residual(const EquationSpec& eq, const Expr& g);

// u is given in terms of phi(t) and psi(x); each ODE template is a residual
// in phi(t) (resp. psi(x)) and its derivatives. A template without a second
// derivative must have the form a*phi'^2 + b(phi).
struct SeparationSpec {
  Expr q, g;
  Expr u;
  Expr phi_ode, psi_ode;
  std::optional<Expr> phi_explicit, psi_explicit;
  // Sampling intervals for the placeholders phi0, phi1, psi0, psi1 standing
  // for phi, phi', psi, psi'.
  std::map<std::string, std::pair<Rational, Rational>> chart;
};

// g*q' - q'' and the mixed derivative of q(u) along the separated form.
ZeroVerdict separation_consistency(const SeparationSpec& s, const std::vector<ParamConstraint>& constraints = {});

ZeroVerdict verify_separation(const EquationSpec& eq, const SeparationSpec& s);

// Case C of the separation analysis: h h'' - h'^2 = a h' + b.
struct ScaffoldBranch {
  std::string name;
  ZeroVerdict verdict;
  bool expect_zero = true;  // false for relations recorded as printed but inconsistent
};
std::vector<ScaffoldBranch> integrate_case_C_scaffold();

}  // namespace liesym
