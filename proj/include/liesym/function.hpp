// Function symbols and their derivative rules.
#pragma once

#include <optional>
#include <string>

#include "liesym/expr.hpp"

namespace liesym {

struct FunctionSpec {
  enum class Mode { Opaque, Antiderivative, LogDerivative, ClosedForm };

  std::string name;
  int arity = 1;
  Mode mode = Mode::Opaque;
  Var var = Var::x;        // independent variable used by `rule`
  FunctionRef integrand;   // Antiderivative: d/dz name(z) = integrand(z)
  Expr rule;               // LogDerivative: r(var) with F' = r F; ClosedForm: body(var)
  Rational anchor = 0;     // LogDerivative: F(anchor) = 1 for numeric evaluation
  std::optional<Rational> lower, upper;  // declared open domain for the argument
  std::string note;
};

FunctionRef make_opaque(const std::string& name, int arity = 1);
FunctionRef make_antiderivative(const std::string& name, FunctionRef integrand);
// Throws if r is identically zero or has an identically vanishing denominator.
FunctionRef make_log_derivative(const std::string& name, Var var, Expr r, Rational anchor = 0);
FunctionRef make_closed_form(const std::string& name, Var var, Expr body);

// Standard symbols of the class: f(x), H(u), K(u), IH, IK, g, h, q, phi, psi,
// and the three-argument symmetry coefficients tau, xi, eta.
FunctionRef std_function(const std::string& name);

}  // namespace liesym
