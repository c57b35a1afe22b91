// Expression grammar.
//
//   expr    := term (("+" | "-") term)*
//   term    := unary (("*" | "/") unary)*
//   unary   := ("-" | "+") unary | power
//   power   := primary ("^" unary)?
//   primary := number | "(" expr ")" | call | "D[" int ("," int)* "]" name "(" args ")" | name
//   call    := name "'"* "(" args ")"
//   args    := expr ("," expr)*
//
// Names resolve to base variables (t, x, u, omega), jet coordinates (u_t ...
// u_xxx), declared parameters, declared element symbols, kernels (exp, ln,
// log, sin, cos, tan, sec, cosh, sinh, tanh, atan, arctan, sqrt, abs, sign)
// and declared function symbols. Primes on a unary function denote
// derivatives; D[i,j,k] gives a multi-argument derivative.
#pragma once

#include <map>
#include <set>
#include <string>

#include "liesym/expr.hpp"

namespace liesym {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

struct ParseContext {
  std::map<std::string, FunctionRef> functions;
  std::set<std::string> params;
  std::set<std::string> elements;
  int max_jet_order = 3;

  // Standard parameters and function symbols of the class.
  static const ParseContext& standard();
  ParseContext& declare_param(const std::string& name);
  ParseContext& declare_function(FunctionRef fn);
  ParseContext& declare_element(const std::string& name);
};

Expr parse(const std::string& text, const ParseContext& ctx = ParseContext::standard());

}  // namespace liesym
