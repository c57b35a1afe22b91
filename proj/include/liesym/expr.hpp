// Canonical symbolic expressions.
//
// An Expr is an immutable rational function N / (S1^k1 ... Sn^kn) where N is a
// Laurent polynomial over Q in interned generators and each Si is a primitive
// multi-term polynomial. Generators are base variables, jet coordinates,
// parameters, function applications and kernel applications (ln, sin, cos,
// atan, and symbolic powers). Symbolic powers are grouped into families by
// base: all factors sharing a base are merged into one total exponent and
// re-split canonically, so u*u^mu, u^(mu+1) and exp(ln(u)*(mu+1)) coincide.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace liesym {

using Rational = mpq_class;
using Integer = mpz_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Var : std::uint8_t { t = 0, x = 1, u = 2, omega = 3 };

const char* var_name(Var v);

struct FunctionSpec;
using FunctionRef = std::shared_ptr<const FunctionSpec>;

class Expr;
class Gen;
using GenRef = const Gen*;

struct Factor {
  GenRef gen;
  int exp;
};
using Monomial = std::vector<Factor>;  // ascending generator order, exp != 0

struct Term {
  Monomial mono;
  Rational coef;
};
using Poly = std::vector<Term>;  // descending monomial order, unique monomials

struct DenFactor {
  Poly poly;  // primitive, at least two terms, positive leading coefficient
  int mult;
};

struct RatFunc {
  Poly num;
  std::vector<DenFactor> den;  // sorted by polynomial order
  std::uint64_t hash = 0;
};

class Expr {
 public:
  Expr();
  Expr(int v);
  Expr(long v);
  Expr(const Rational& q);

  static Expr from_rep(RatFunc rf);  // rf must already be canonical
  static Expr from_gen(GenRef g, int exp = 1);

  const RatFunc& rep() const { return *rep_; }
  const Poly& num() const { return rep_->num; }
  const std::vector<DenFactor>& den() const { return rep_->den; }
  std::uint64_t hash() const { return rep_->hash; }

  bool is_zero() const { return rep_->num.empty(); }
  bool is_constant() const;
  std::optional<Rational> as_rational() const;
  // Single generator with exponent one and unit coefficient.
  GenRef as_gen() const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator/=(const Expr& o);

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  std::shared_ptr<const RatFunc> rep_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

// Sum of many expressions; cheaper than folding operator+.
Expr sum(std::vector<Expr> parts);

// Total structural order used for canonical sorting.
int compare(const Expr& a, const Expr& b);
int compare(GenRef a, GenRef b);

enum class GenKind : std::uint8_t { Param, Var, Element, Jet, Func, Pow, Ln, Sin, Cos, Atan };
enum class BaseKind : std::uint8_t { E, Prime, Atom, Compound };

class Gen {
 public:
  GenKind kind;
  std::string name;          // Param, Element, Func
  int a = 0, b = 0;          // Var index; Jet (nt, nx)
  FunctionRef fn;            // Func
  std::vector<int> deriv;    // Func derivative multi-index
  std::vector<Expr> args;    // Func arguments; Ln/Sin/Cos/Atan argument in args[0]
  BaseKind base_kind = BaseKind::E;  // Pow
  GenRef base_atom = nullptr;        // Pow with Atom base
  Integer prime;                     // Pow with Prime base
  Expr base_poly;                    // Pow with Compound base
  Expr piece;                        // Pow exponent piece
  // Pow piece shape: Unit is the integer step of an E base, Simple a
  // unit-coefficient monomial m, Const a rational in (0,1), Scaled m/q with
  // q > 1, Fraction a proper rational function divided by q.
  enum class Piece : std::uint8_t { Unit, Simple, Const, Scaled, Fraction };
  Piece piece_class = Piece::Simple;
  Integer piece_q = 1;
  Expr piece_shape;  // piece * piece_q
  std::uint64_t hash = 0;
  // Leaf and function-application generators this one depends on (including
  // itself when it is a leaf or function application), sorted by address.
  std::vector<GenRef> deps;

  bool is_leaf() const {
    return kind == GenKind::Param || kind == GenKind::Var || kind == GenKind::Element ||
           kind == GenKind::Jet;
  }
  int jet_order() const { return kind == GenKind::Jet ? a + b : 0; }
  bool depends_on(GenRef leaf) const;
};

// Leaf and atom constructors.
Expr var(Var v);
Expr jet(int nt, int nx);
Expr param(const std::string& name);
Expr element(const std::string& name);  // extended-space coordinates and operator basis symbols
Expr func(const FunctionRef& fn, std::vector<Expr> args, std::vector<int> deriv = {});

GenRef var_gen(Var v);
GenRef jet_gen(int nt, int nx);
GenRef param_gen(const std::string& name);
GenRef element_gen(const std::string& name);

// Kernels. abs is the identity and sign is +1 (positive chart).
Expr pow(const Expr& base, long n);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr sec(const Expr& e);
Expr cosh(const Expr& e);
Expr sinh(const Expr& e);
Expr tanh(const Expr& e);
Expr atan(const Expr& e);
Expr sqrt(const Expr& e);
Expr abs(const Expr& e);
Expr sign(const Expr& e);

// Calculus.
Expr diff(const Expr& e, GenRef wrt);
Expr diff(const Expr& e, Var v);
Expr diff(const Expr& e, Var v, int times);

// Substitution. Leaf bindings and function bindings are applied simultaneously.
struct FunctionBinding {
  std::vector<Var> vars;
  Expr body;
};
struct Bindings {
  std::map<GenRef, Expr> leaves;  // keys are leaf or function-application generators
  std::map<const FunctionSpec*, FunctionBinding> functions;
  std::map<std::string, FunctionBinding> functions_by_name;
  Bindings& bind(GenRef g, Expr value);
  Bindings& bind(Var v, Expr value);
  Bindings& bind_param(const std::string& name, Expr value);
  Bindings& bind_function(const std::string& name, std::vector<Var> vars, Expr body);
  bool empty() const { return leaves.empty() && functions.empty() && functions_by_name.empty(); }
};
Expr substitute(const Expr& e, const Bindings& b);

// Introspection.
std::vector<GenRef> generators(const Expr& e);  // top-level generators, sorted
std::vector<GenRef> leaves(const Expr& e);      // all leaf and function dependencies
bool depends_on(const Expr& e, GenRef leaf);
int max_jet_order(const Expr& e);
std::size_t term_count(const Expr& e);
Expr numerator(const Expr& e);
Expr denominator(const Expr& e);
// Coefficients of e as a polynomial in the given generators (which must appear
// only in the numerator with nonnegative exponents).
std::vector<std::pair<Monomial, Expr>> coefficients_in(const Expr& e,
                                                        const std::vector<GenRef>& gens);
// Rewrites top-level generators for which fn returns a value; others are kept.
Expr map_generators(const Expr& e, const std::function<std::optional<Expr>(GenRef)>& fn);

std::string to_string(const Expr& e);
std::string to_string(GenRef g);
std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace liesym
