// Seeded random expressions for round-trip and derivative-rule properties.
#pragma once

#include <cstdint>
#include <random>

#include "liesym/function.hpp"

namespace liesym::test {

// Random expressions over a fixed leaf pool with rational constants.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  Expr leaf() {
    switch (rng_() % 9) {
      case 0: return var(Var::t);
      case 1: return var(Var::x);
      case 2: return var(Var::u);
      case 3: return jet(0, 1);
      case 4: return jet(1, 0);
      case 5: return param("mu");
      case 6: return func(std_function("f"), {var(Var::x)});
      case 7: return func(std_function("H"), {var(Var::u)});
      default: {
        Rational q(static_cast<long>(rng_() % 9) - 4, static_cast<long>(rng_() % 3) + 1);
        q.canonicalize();
        return Expr(q);
      }
    }
  }

  Expr expr(int depth) {
    if (depth == 0) return leaf();
    switch (rng_() % 10) {
      case 0: return expr(depth - 1) + expr(depth - 1);
      case 1: return expr(depth - 1) - expr(depth - 1);
      case 2:
      case 3: return expr(depth - 1) * expr(depth - 1);
      case 4: {
        Expr d = expr(depth - 1);
        return d.is_zero() ? expr(depth - 1) : expr(depth - 1) / d;
      }
      case 5: return exp(expr(depth - 1));
      case 6: return pow(expr(depth - 1), static_cast<long>(rng_() % 4));
      case 7: return sin(expr(depth - 1));
      case 8: return pow(var(Var::u), param("mu")) * expr(depth - 1);
      default: return leaf();
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace liesym::test
