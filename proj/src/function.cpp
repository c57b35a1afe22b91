#include "liesym/function.hpp"

#include <map>

#include "expr_internal.hpp"

namespace liesym {

FunctionRef make_opaque(const std::string& name, int arity) {
  auto f = std::make_shared<FunctionSpec>();
  f->name = name;
  f->arity = arity;
  return f;
}

FunctionRef make_antiderivative(const std::string& name, FunctionRef integrand) {
  if (!integrand || integrand->arity != 1) throw Error("antiderivative needs a unary integrand");
  auto f = std::make_shared<FunctionSpec>();
  f->name = name;
  f->mode = FunctionSpec::Mode::Antiderivative;
  f->integrand = std::move(integrand);
  f->var = f->integrand->var;
  return f;
}

FunctionRef make_log_derivative(const std::string& name, Var var, Expr r, Rational anchor) {
  if (r.is_zero()) throw Error("log-derivative rule of " + name + " is identically zero");
  for (GenRef g : leaves(r))
    if (g->kind == GenKind::Var && g != var_gen(var))
      throw Error("log-derivative rule of " + name + " depends on a foreign variable");
  auto f = std::make_shared<FunctionSpec>();
  f->name = name;
  f->mode = FunctionSpec::Mode::LogDerivative;
  f->var = var;
  f->rule = std::move(r);
  f->anchor = anchor;
  return f;
}

FunctionRef make_closed_form(const std::string& name, Var var, Expr body) {
  auto f = std::make_shared<FunctionSpec>();
  f->name = name;
  f->mode = FunctionSpec::Mode::ClosedForm;
  f->var = var;
  f->rule = std::move(body);
  return f;
}

FunctionRef std_function(const std::string& name) {
  static const std::map<std::string, FunctionRef> table = [] {
    std::map<std::string, FunctionRef> m;
    auto add = [&](FunctionRef f) { m[f->name] = f; };
    auto unary = [&](const std::string& n, Var v) {
      auto f = std::make_shared<FunctionSpec>();
      f->name = n;
      f->var = v;
      add(f);
      return FunctionRef(f);
    };
    unary("f", Var::x);
    auto H = unary("H", Var::u);
    auto K = unary("K", Var::u);
    add(make_antiderivative("IH", H));
    add(make_antiderivative("IK", K));
    unary("g", Var::u);
    unary("h", Var::u);
    unary("q", Var::u);
    unary("phi", Var::omega);
    unary("psi", Var::x);
    for (const char* n : {"tau", "xi", "eta"}) add(make_opaque(n, 3));
    return m;
  }();
  auto it = table.find(name);
  return it == table.end() ? nullptr : it->second;
}

Expr func(const FunctionRef& fn, std::vector<Expr> args, std::vector<int> deriv) {
  if (!fn) throw Error("null function symbol");
  if (static_cast<int>(args.size()) != fn->arity)
    throw Error("function " + fn->name + " expects " + std::to_string(fn->arity) + " argument(s)");
  if (deriv.empty()) deriv.assign(args.size(), 0);
  if (deriv.size() != args.size()) throw Error("derivative multi-index size mismatch for " + fn->name);
  for (int d : deriv)
    if (d < 0) throw Error("negative derivative order");
  switch (fn->mode) {
    case FunctionSpec::Mode::ClosedForm: {
      Expr body = diff(fn->rule, fn->var, deriv[0]);
      return substitute(body, Bindings().bind(fn->var, args[0]));
    }
    case FunctionSpec::Mode::Antiderivative:
      if (deriv[0] > 0) return func(fn->integrand, std::move(args), {deriv[0] - 1});
      break;
    case FunctionSpec::Mode::LogDerivative:
      if (deriv[0] > 0) {
        Expr z = var(fn->var);
        Expr e = func(fn, {z}, {0});
        for (int i = 0; i < deriv[0]; ++i) e = diff(e, fn->var);
        return substitute(e, Bindings().bind(fn->var, args[0]));
      }
      break;
    case FunctionSpec::Mode::Opaque: break;
  }
  Gen g;
  g.kind = GenKind::Func;
  g.name = fn->name;
  g.fn = fn;
  g.deriv = std::move(deriv);
  g.args = std::move(args);
  return Expr::from_gen(detail::intern(std::move(g)));
}

}  // namespace liesym
