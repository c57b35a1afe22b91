// Shared helpers for the unit tests.
#pragma once

#include <string>
#include <vector>

#include "liesym/detsys.hpp"
#include "liesym/parse.hpp"

namespace liesym::test {

inline Expr P(const std::string& s) { return parse(s); }

inline VectorField V(const std::string& tau, const std::string& xi, const std::string& eta) {
  return {parse(tau), parse(xi), parse(eta)};
}

inline EquationSpec E(const std::string& f, const std::string& H, const std::string& K,
                      const std::vector<std::string>& constraints = {}) {
  EquationSpec eq{f + " | " + H + " | " + K, parse(f), parse(H), parse(K), {}};
  for (const auto& c : constraints) eq.constraints.push_back(parse_constraint(c));
  return eq;
}

}  // namespace liesym::test
