// Deterministic numeric evaluation in 50-digit floating point.
#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liesym/expr.hpp"

namespace liesym {

using Real = boost::multiprecision::mpfr_float_50;

class SingularPoint : public Error {
 public:
  using Error::Error;
};

struct ParamConstraint {
  enum class Op { NotEqual, Equal, InSet, Greater, Less };
  std::string name;
  Op op = Op::NotEqual;
  std::vector<Rational> values;

  bool holds(const Rational& v) const;
  std::string to_string() const;
};

// Parses "mu != -4", "k = 2", "eps in {-1, 1}", "x > 0".
ParamConstraint parse_constraint(const std::string& text);

// Seed used by default-constructed sample domains.
std::uint64_t default_seed();
void set_default_seed(std::uint64_t seed);

struct SampleDomain {
  std::map<std::string, std::pair<Rational, Rational>> intervals;  // by symbol name
  std::vector<ParamConstraint> constraints;
  std::uint64_t seed = default_seed();
  int points = 50;
  double tolerance = 1e-9;
  double margin = 1e-3;
  int max_retries = 4000;
};

struct Assignment {
  std::map<GenRef, Real> values;  // leaf generators and pinned function applications
  std::uint64_t model_seed = 0x5EED;
  double margin = 0;  // singularity margin applied during evaluation
};

// Value of e at a point. Opaque functions evaluate through seeded smooth
// models; log-derivative functions are integrated from their anchor.
Real eval(const Expr& e, const Assignment& a);

// Numerator value and the sum of absolute term values, for relative tests.
struct Residual {
  Real value;
  Real scale;
};
Residual eval_residual(const Expr& e, const Assignment& a);

// ln F(z) for a log-derivative function integrated with a fixed number of
// steps (steps <= 0 selects adaptive step doubling).
Real integrate_log_derivative(const FunctionSpec& fn, const Real& z, const Assignment& a, int steps = 0);

// Draws an admissible point for the given leaves.
class Sampler {
 public:
  Sampler(const SampleDomain& dom);
  Assignment draw(const std::vector<GenRef>& leaves);

 private:
  const SampleDomain& dom_;
  std::uint64_t state_;
  double uniform();
};

std::string format_real(const Real& r, int digits = 12);

}  // namespace liesym
