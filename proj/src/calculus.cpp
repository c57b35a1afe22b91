#include <algorithm>
#include <set>
#include <unordered_map>

#include "expr_internal.hpp"
#include "liesym/expr.hpp"
#include "liesym/function.hpp"

namespace liesym {

using namespace detail;

namespace {

Expr diff_gen(GenRef g, GenRef wrt);

Expr diff_impl(const Expr& e, GenRef wrt, std::unordered_map<GenRef, Expr>& memo) {
  if (!depends_on(e, wrt)) return Expr();
  auto dgen = [&](GenRef g) -> const Expr& {
    auto it = memo.find(g);
    if (it == memo.end()) it = memo.emplace(g, diff_gen(g, wrt)).first;
    return it->second;
  };
  auto dpoly = [&](const Poly& p) {
    std::vector<Expr> parts;
    for (const auto& t : p) {
      for (std::size_t i = 0; i < t.mono.size(); ++i) {
        const Factor& f = t.mono[i];
        if (f.gen != wrt && !f.gen->depends_on(wrt)) continue;
        const Expr& dg = dgen(f.gen);
        if (dg.is_zero()) continue;
        Monomial m = t.mono;
        if (f.exp == 1)
          m.erase(m.begin() + static_cast<long>(i));
        else
          m[i].exp -= 1;
        parts.push_back(poly_expr({Term{std::move(m), t.coef * f.exp}}) * dg);
      }
    }
    return sum(std::move(parts));
  };
  Expr dn = dpoly(e.num());
  if (e.den().empty()) return dn;
  std::vector<Expr> out;
  out.push_back(with_den(dn, e.den()));
  Expr n = numerator(e);
  for (std::size_t i = 0; i < e.den().size(); ++i) {
    const DenFactor& d = e.den()[i];
    Expr ds = dpoly(d.poly);
    if (ds.is_zero()) continue;
    auto den = e.den();
    den[i].mult += 1;
    out.push_back(with_den(n * ds * Expr(-d.mult), den));
  }
  return sum(std::move(out));
}

Expr diff_gen(GenRef g, GenRef wrt) {
  if (g == wrt) return Expr(1);
  if (g->is_leaf()) return Expr();
  switch (g->kind) {
    case GenKind::Func: {
      const auto& fn = g->fn;
      std::vector<Expr> parts;
      for (std::size_t i = 0; i < g->args.size(); ++i) {
        Expr da = diff(g->args[i], wrt);
        if (da.is_zero()) continue;
        Expr dF;
        if (fn->mode == FunctionSpec::Mode::LogDerivative) {
          Expr r = substitute(fn->rule, Bindings().bind(fn->var, g->args[0]));
          dF = r * Expr::from_gen(g);
        } else {
          auto deriv = g->deriv;
          deriv[i] += 1;
          dF = func(fn, g->args, deriv);
        }
        parts.push_back(dF * da);
      }
      return sum(std::move(parts));
    }
    case GenKind::Pow: {
      BaseSpec b = base_of(g);
      Expr self = Expr::from_gen(g);
      Expr dp = diff(g->piece, wrt);
      Expr r;
      if (!dp.is_zero()) r += dp * ln_of_base(b);
      if (b.kind == BaseKind::Atom || b.kind == BaseKind::Compound) {
        Expr be = base_expr(b);
        Expr db = diff(be, wrt);
        if (!db.is_zero()) r += g->piece * db / be;
      }
      return self * r;
    }
    case GenKind::Ln: {
      const Expr& a = g->args[0];
      return diff(a, wrt) / a;
    }
    case GenKind::Sin: return cos(g->args[0]) * diff(g->args[0], wrt);
    case GenKind::Cos: return -sin(g->args[0]) * diff(g->args[0], wrt);
    case GenKind::Atan: {
      const Expr& a = g->args[0];
      return diff(a, wrt) / (Expr(1) + a * a);
    }
    default: return Expr();
  }
}

// Rebuilds e with generator images; generators without an image are kept.
Expr rebuild(const Expr& e, const std::function<std::optional<Expr>(GenRef)>& image) {
  std::unordered_map<GenRef, std::optional<Expr>> memo;
  auto get = [&](GenRef g) -> const std::optional<Expr>& {
    auto it = memo.find(g);
    if (it == memo.end()) it = memo.emplace(g, image(g)).first;
    return it->second;
  };
  auto rebuild_poly = [&](const Poly& p) {
    std::vector<Term> keep;
    std::vector<Expr> parts;
    for (const auto& t : p) {
      bool changed = false;
      for (const auto& f : t.mono) changed |= get(f.gen).has_value();
      if (!changed) {
        keep.push_back(t);
        continue;
      }
      Monomial rest;
      std::vector<Expr> factors;
      for (const auto& f : t.mono) {
        const auto& v = get(f.gen);
        if (v)
          factors.push_back(pow(*v, f.exp));
        else
          rest.push_back(f);
      }
      Expr term = poly_expr({Term{rest, t.coef}});
      for (const auto& fx : factors) term = term * fx;
      parts.push_back(term);
    }
    sort_combine(keep);
    parts.push_back(make(std::move(keep), {}));
    return sum(std::move(parts));
  };
  Expr n = rebuild_poly(e.num());
  if (e.den().empty()) return n;
  Expr d(1);
  for (const auto& f : e.den()) d = d * pow(rebuild_poly(f.poly), f.mult);
  return n / d;
}

const FunctionBinding* find_function_binding(const Bindings& b, const FunctionSpec* fn) {
  auto it = b.functions.find(fn);
  if (it != b.functions.end()) return &it->second;
  auto jt = b.functions_by_name.find(fn->name);
  if (jt != b.functions_by_name.end()) return &jt->second;
  return nullptr;
}

void check_acyclic(const Bindings& b) {
  // Self references are fine under simultaneous substitution; longer cycles are not.
  std::map<GenRef, std::vector<GenRef>> edges;
  for (const auto& [k, v] : b.leaves)
    for (const auto& [k2, v2] : b.leaves)
      if (k2 != k && depends_on(v, k2)) edges[k].push_back(k2);
  std::map<GenRef, int> state;
  std::function<void(GenRef)> dfs = [&](GenRef n) {
    state[n] = 1;
    for (GenRef m : edges[n]) {
      if (state[m] == 1) throw Error("cyclic binding set");
      if (state[m] == 0) dfs(m);
    }
    state[n] = 2;
  };
  for (const auto& [k, v] : b.leaves)
    if (state[k] == 0) dfs(k);
}

}  // namespace

Expr diff(const Expr& e, GenRef wrt) {
  std::unordered_map<GenRef, Expr> memo;
  return diff_impl(e, wrt, memo);
}

Expr diff(const Expr& e, Var v) { return diff(e, var_gen(v)); }

Expr diff(const Expr& e, Var v, int times) {
  Expr r = e;
  for (int i = 0; i < times; ++i) r = diff(r, v);
  return r;
}

Bindings& Bindings::bind(GenRef g, Expr value) {
  leaves[g] = std::move(value);
  return *this;
}
Bindings& Bindings::bind(Var v, Expr value) { return bind(var_gen(v), std::move(value)); }
Bindings& Bindings::bind_param(const std::string& name, Expr value) {
  return bind(param_gen(name), std::move(value));
}
Bindings& Bindings::bind_function(const std::string& name, std::vector<Var> vars, Expr body) {
  functions_by_name[name] = FunctionBinding{std::move(vars), std::move(body)};
  return *this;
}

Expr substitute(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  check_acyclic(b);
  std::function<std::optional<Expr>(GenRef)> image;
  auto touched = [&](GenRef g) {
    for (GenRef d : g->deps) {
      if (b.leaves.count(d)) return true;
      if (d->kind == GenKind::Func && find_function_binding(b, d->fn.get())) return true;
    }
    return false;
  };
  auto sub = [&](const Expr& x) { return rebuild(x, image); };
  image = [&](GenRef g) -> std::optional<Expr> {
    if (auto it = b.leaves.find(g); it != b.leaves.end()) return it->second;
    if (!touched(g)) return std::nullopt;
    switch (g->kind) {
      case GenKind::Func: {
        std::vector<Expr> args;
        for (const auto& a : g->args) args.push_back(sub(a));
        if (const FunctionBinding* fb = find_function_binding(b, g->fn.get())) {
          if (fb->vars.size() != args.size()) throw Error("function binding arity mismatch for " + g->name);
          Expr body = fb->body;
          for (std::size_t i = 0; i < g->deriv.size(); ++i) body = diff(body, fb->vars[i], g->deriv[i]);
          Bindings inner;
          for (std::size_t i = 0; i < args.size(); ++i) inner.bind(fb->vars[i], args[i]);
          return substitute(body, inner);
        }
        return func(g->fn, args, g->deriv);
      }
      case GenKind::Pow: {
        BaseSpec bs = base_of(g);
        Expr piece = sub(g->piece);
        if (bs.kind == BaseKind::E) return exp(piece);
        return pow(sub(base_expr(bs)), piece);
      }
      case GenKind::Ln: return ln(sub(g->args[0]));
      case GenKind::Sin: return sin(sub(g->args[0]));
      case GenKind::Cos: return cos(sub(g->args[0]));
      case GenKind::Atan: return atan(sub(g->args[0]));
      default: return std::nullopt;
    }
  };
  return rebuild(e, image);
}

Expr map_generators(const Expr& e, const std::function<std::optional<Expr>(GenRef)>& fn) {
  return rebuild(e, fn);
}

}  // namespace liesym
