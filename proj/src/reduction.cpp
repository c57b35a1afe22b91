#include "liesym/reduction.hpp"

#include <algorithm>

#include "liesym/function.hpp"

namespace liesym {

Expr omega() { return var(Var::omega); }

Expr phi_of_omega(int order) {
  if (order == 0) return func(std_function("phi"), {omega()});
  return func(std_function("phi"), {omega()}, {order});
}

namespace {

Expr on_omega(const Expr& e, const Expr& w) { return substitute(e, Bindings().bind(Var::omega, w)); }

SampleDomain domain_with(const EquationSpec& eq, const std::vector<ParamConstraint>& extra) {
  SampleDomain d = sample_domain(eq);
  for (const auto& c : extra) d.constraints.push_back(c);
  return d;
}

}  // namespace

Expr ansatz_invariance_residual(const Ansatz& a) {
  Expr U = on_omega(a.u, a.omega_of);
  Bindings on_ansatz;
  on_ansatz.bind(Var::u, U);
  const VectorField& q = a.generator;
  return substitute(q.eta, on_ansatz) - substitute(q.tau, on_ansatz) * diff(U, Var::t) -
         substitute(q.xi, on_ansatz) * diff(U, Var::x);
}

Expr reduce(const EquationSpec& eq, const Ansatz& a) {
  const Expr& w = a.omega_of;
  Expr U = on_omega(a.u, w);
  Expr R = substitute_jets(delta(eq), U);
  Expr N;
  for (int k = 2; k >= 0 && N.is_zero(); --k) {
    Expr lead = on_omega(phi_of_omega(k), w);
    Expr c = diff(R, lead.as_gen());
    if (!c.is_zero()) N = R / c;
  }
  if (N.is_zero()) throw Error("substituted equation does not involve phi");
  Expr J = diff(w, Var::x) * diff(N, Var::t) - diff(w, Var::t) * diff(N, Var::x);
  if (!is_zero(J, ZeroMode::Auto, sample_domain(eq)).zero())
    throw Error("substituted equation does not depend on t and x through omega alone");

  // Restrict to a line on which omega coincides with one base variable.
  Expr t = var(Var::t), x = var(Var::x);
  auto attempt = [&](Var fixed, int value, Var free) -> std::optional<Expr> {
    try {
      Bindings at;
      at.bind(fixed, Expr(value));
      if (!(substitute(w, at) == var(free))) return std::nullopt;
      Expr line = substitute(N, at);
      return substitute(line, Bindings().bind(free, omega()));
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  GenRef xg = var_gen(Var::x);
  for (int v : {0, 1}) {
    if (depends_on(w, xg)) {
      if (auto r = attempt(Var::t, v, Var::x)) return *r;
    } else if (auto r = attempt(Var::x, 1 - v, Var::t)) {
      return *r;
    }
  }
  throw Error("cannot restrict omega = " + to_string(w) + " to a coordinate line");
}

ReductionMatch check_reduction(const EquationSpec& eq, const Ansatz& a, const Expr& expected,
                               const std::vector<ParamConstraint>& constraints) {
  ReductionMatch m;
  if (expected.is_zero()) throw Error("expected reduced equation is zero");
  Expr R = substitute_jets(delta(eq), on_omega(a.u, a.omega_of));
  m.ratio = R / on_omega(expected, a.omega_of);
  SampleDomain dom = domain_with(eq, constraints);
  ZeroVerdict v;
  if (m.ratio.is_zero()) {
    v.grade = Grade::NonZero;
    v.reason = "substituted equation vanishes identically";
  }
  for (GenRef g : leaves(m.ratio))
    if (g->kind == GenKind::Func && g->fn->name == "phi") v = combine(v, is_zero(diff(m.ratio, g), ZeroMode::Auto, dom));
  m.verdict = v;
  m.matches = v.zero();
  return m;
}

const char* form_name(Solution::Form f) {
  switch (f) {
    case Solution::Form::Closed: return "closed";
    case Solution::Form::Implicit: return "implicit";
    case Solution::Form::Quadrature: return "quadrature";
    case Solution::Form::Separated: return "separated";
  }
  return "closed";
}

namespace {

// Jets of u defined implicitly by F(t, x, u) = 0 through its partials.
Expr implicit_residual(const EquationSpec& eq, const Expr& Fu, const Expr& Ft, const Expr& Fx) {
  Expr ut = -Ft / Fu, ux = -Fx / Fu;
  auto Dt = [&](const Expr& g) { return diff(g, Var::t) + diff(g, Var::u) * ut; };
  auto Dx = [&](const Expr& g) { return diff(g, Var::x) + diff(g, Var::u) * ux; };
  Bindings b;
  b.bind(jet_gen(1, 0), ut).bind(jet_gen(0, 1), ux);
  b.bind(jet_gen(2, 0), Dt(ut)).bind(jet_gen(1, 1), Dx(ut)).bind(jet_gen(0, 2), Dx(ux));
  return substitute(delta(eq), b);
}

// Samples the constants and (t, x), solves R = 0 for u by bracketing and
// bisection, and evaluates the residual there.
ZeroVerdict numeric_implicit(const Expr& R, const Expr& res, const SampleDomain& dom) {
  std::vector<GenRef> ls;
  GenRef ug = var_gen(Var::u);
  for (const Expr* e : {&R, &res})
    for (GenRef g : leaves(*e))
      if (g != ug && std::find(ls.begin(), ls.end(), g) == ls.end()) ls.push_back(g);
  Sampler sampler(dom);
  ZeroVerdict v;
  int good = 0, tries = 0;
  double worst = 0;
  auto value = [&](Assignment& a, const Real& u) -> std::optional<Real> {
    a.values[ug] = u;
    try {
      return eval(R, a);
    } catch (const SingularPoint&) {
      return std::nullopt;
    }
  };
  while (good < dom.points) {
    if (++tries > dom.max_retries) {
      if (good == 0) throw Error("implicit relation not solvable on the sampling chart");
      v.grade = Grade::Skipped;
      v.reason = "too few points with a bracketed root";
      return v;
    }
    Assignment a = sampler.draw(ls);
    a.margin = dom.margin;
    std::optional<Real> lo_val, root;
    Real lo = -8, step = Real(1) / 20;
    for (int i = 0; i <= 320 && !root; ++i) {
      Real u = Real(-8) + step * i;
      auto val = value(a, u);
      if (!val) {
        lo_val.reset();
        continue;
      }
      if (lo_val && ((*lo_val < 0) != (*val < 0))) {
        Real l = lo, h = u, fl = *lo_val;
        for (int it = 0; it < 160; ++it) {
          Real m = (l + h) / 2;
          auto fm = value(a, m);
          if (!fm) break;
          if ((*fm < 0) == (fl < 0)) {
            l = m;
            fl = *fm;
          } else {
            h = m;
          }
        }
        root = (l + h) / 2;
      }
      lo = u;
      lo_val = val;
    }
    if (!root) continue;
    a.values[ug] = *root;
    Residual r;
    try {
      r = eval_residual(res, a);
    } catch (const SingularPoint&) {
      continue;
    }
    ++good;
    double rel = r.scale == 0 ? 0.0 : static_cast<double>(abs(r.value) / r.scale);
    worst = std::max(worst, rel);
    if (rel > dom.tolerance) {
      v.grade = Grade::NonZero;
      v.max_residual = rel;
      for (const auto& [g, x] : a.values) v.witness[to_string(g)] = format_real(x, 17);
      v.reason = "implicit relation solved numerically";
      return v;
    }
  }
  v.grade = Grade::NumericZero;
  v.max_residual = worst;
  v.reason = "implicit relation solved numerically";
  return v;
}

ZeroVerdict with_reason(ZeroVerdict v, const std::string& path) {
  v.reason = v.reason.empty() ? path : path + "; " + v.reason;
  return v;
}

ZeroVerdict verify_closed(const EquationSpec& eq, const Expr& u, const SampleDomain& dom, const std::string& path) {
  return with_reason(is_zero(substitute_jets(delta(eq), u), ZeroMode::Auto, dom), path);
}

}  // namespace

ZeroVerdict verify_solution(const EquationSpec& eq, const Solution& s) {
  SampleDomain dom = domain_with(eq, s.constraints);
  switch (s.form) {
    case Solution::Form::Closed: return verify_closed(eq, s.u, dom, "closed form");
    case Solution::Form::Separated: return with_reason(verify_separation(eq, s.separation), "separation");
    case Solution::Form::Implicit:
    case Solution::Form::Quadrature: break;
  }
  Expr Fu, Ft, Fx;
  GenRef ug = var_gen(Var::u);
  if (s.form == Solution::Form::Implicit) {
    Fu = diff(s.relation, Var::u);
    Ft = diff(s.relation, Var::t);
    Fx = diff(s.relation, Var::x);
    if (Fu.is_zero()) throw Error("implicit relation does not involve u");
    if (!depends_on(Fu, ug))
      return verify_closed(eq, var(Var::u) - s.relation / Fu, dom, "implicit relation solved for u");
  } else {
    Fu = s.integrand;
    Ft = -diff(s.rhs, Var::t);
    Fx = -diff(s.rhs, Var::x);
  }
  std::string path = s.form == Solution::Form::Implicit ? "implicit differentiation" : "quadrature differentiation";
  if (Ft.is_zero() && Fx.is_zero()) path += " (relation fixes u to a constant)";
  Expr res = implicit_residual(eq, Fu, Ft, Fx);
  if (res.is_zero()) {
    ZeroVerdict v;
    return with_reason(v, path);
  }
  // A constant entering the relation linearly can absorb any value of u, so
  // after eliminating it the residual must vanish for independent t, x, u.
  const Expr& rel = s.form == Solution::Form::Implicit ? s.relation : s.rhs;
  for (GenRef c : leaves(rel)) {
    if (c->kind != GenKind::Param) continue;
    Expr rc = diff(rel, c);
    if (rc.is_zero() || depends_on(rc, c)) continue;
    if (s.form == Solution::Form::Quadrature) {
      if (depends_on(rc, var_gen(Var::t)) || depends_on(rc, var_gen(Var::x))) continue;
      return with_reason(is_zero(res, ZeroMode::Auto, dom), path + " with additive constant " + c->name);
    }
    Expr solved = Expr::from_gen(c) - rel / rc;
    Expr r2 = substitute(res, Bindings().bind(c, solved));
    return with_reason(is_zero(r2, ZeroMode::Auto, dom), path + " with " + c->name + " eliminated");
  }
  if (s.form == Solution::Form::Quadrature) {
    ZeroVerdict v;
    v.grade = Grade::Skipped;
    v.reason = path + ": no free additive constant to eliminate";
    return v;
  }
  return with_reason(numeric_implicit(s.relation, res, dom), path);
}

ZeroVerdict verify_transformed_solution(const EquationSpec& src, const PointTransformation& T, const Solution& s_on_tgt,
                                        Solution* carried) {
  Solution c;
  c.constraints = s_on_tgt.constraints;
  switch (s_on_tgt.form) {
    case Solution::Form::Closed:
      c.form = Solution::Form::Implicit;
      c.relation = T.u_new - in_old_variables(s_on_tgt.u, T);
      break;
    case Solution::Form::Implicit:
      c.form = Solution::Form::Implicit;
      c.relation = in_old_variables(s_on_tgt.relation, T);
      break;
    default: throw Error("only closed-form and implicit solutions can be carried by a point transformation");
  }
  if (carried) *carried = c;
  return verify_solution(src, c);
}

}  // namespace liesym
