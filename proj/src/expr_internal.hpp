// Internal helpers shared by the symkernel translation units.
#pragma once

#include <optional>
#include <vector>

#include "liesym/expr.hpp"

namespace liesym::detail {

struct BaseSpec {
  BaseKind kind = BaseKind::E;
  GenRef atom = nullptr;
  Integer prime;
  Expr poly;
};

std::uint64_t mix(std::uint64_t h, std::uint64_t v);
std::uint64_t hash_string(const std::string& s);
std::uint64_t hash_rational(const Rational& q);

GenRef intern(Gen g);

int mono_cmp(const Monomial& a, const Monomial& b);
bool mono_equal(const Monomial& a, const Monomial& b);
Monomial mono_mul(const Monomial& a, const Monomial& b);
bool needs_canon(const Monomial& m);
Expr canon_term(const Monomial& m, const Rational& c);

bool poly_equal(const Poly& a, const Poly& b);
int poly_cmp(const Poly& a, const Poly& b);
void sort_combine(std::vector<Term>& terms);
Expr poly_expr(std::vector<Term> raw);  // raw terms may be unsorted or non-canonical
Expr term_expr(const Monomial& m, const Rational& c);

// Canonical leaf generator for the family base of g.
BaseSpec base_of(GenRef g);
bool same_base(const BaseSpec& a, const BaseSpec& b);
Expr base_expr(const BaseSpec& b);
Expr ln_of_base(const BaseSpec& b);
// base^X with X decomposed canonically.
Expr family(const BaseSpec& base, const Expr& X);
// Total exponent of a Pow generator (or of an atom) raised to k.
Expr total_exponent(GenRef g, int k);

Expr with_den(const Expr& num, const std::vector<DenFactor>& extra);
Expr make(Poly num, std::vector<DenFactor> den);

GenRef ln_gen(const Expr& arg);

}  // namespace liesym::detail
