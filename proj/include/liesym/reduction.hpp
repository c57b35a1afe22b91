// Lie reductions to ODEs and verification of exact solutions.
#pragma once

#include <string>
#include <vector>

#include "liesym/gcs.hpp"
#include "liesym/transform.hpp"

namespace liesym {

// Invariant ansatz u = A(phi(omega), t, x). The ansatz is written with the
// reduction variable omega as argument of phi; omega_of gives omega(t, x).
struct Ansatz {
  VectorField generator;
  Expr u;
  Expr omega_of;
};

Expr omega();
Expr phi_of_omega(int order = 0);

// Generator applied to u - A on the ansatz; zero for a consistent ansatz.
Expr ansatz_invariance_residual(const Ansatz& a);

// Reduced ODE in omega, normalized to unit coefficient of phi''. Throws if
// the substituted equation does not depend on t and x through omega alone.
Expr reduce(const EquationSpec& eq, const Ansatz& a);

// The substituted equation must equal m(t, x) times the expected reduced
// equation evaluated at omega(t, x), with m free of phi and its derivatives.
struct ReductionMatch {
  bool matches = false;
  Expr ratio;  // m(t, x)
  ZeroVerdict verdict;
};
ReductionMatch check_reduction(const EquationSpec& eq, const Ansatz& a, const Expr& expected,
                               const std::vector<ParamConstraint>& constraints = {});

struct Solution {
  enum class Form { Closed, Implicit, Quadrature, Separated };
  Form form = Form::Closed;
  Expr u;                     // Closed: u(t, x)
  Expr relation;              // Implicit: R(t, x, u) = 0
  Expr integrand, rhs;        // Quadrature: int integrand(u) du = rhs(t, x)
  SeparationSpec separation;  // Separated
  std::vector<ParamConstraint> constraints;
};

const char* form_name(Solution::Form f);

// The verdict's reason names the path that produced it.
ZeroVerdict verify_solution(const EquationSpec& eq, const Solution& s);

// A solution of the target of T (new variables) carried back to the source
// equation as the relation u~(t,x,u) = S(t~, x~).
ZeroVerdict verify_transformed_solution(const EquationSpec& src, const PointTransformation& T, const Solution& s_on_tgt,
                                        Solution* carried = nullptr);

}  // namespace liesym
