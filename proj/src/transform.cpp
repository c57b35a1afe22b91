#include "liesym/transform.hpp"

#include "liesym/function.hpp"

namespace liesym {

PointTransformation PointTransformation::identity() {
  PointTransformation T;
  T.t_new = var(Var::t);
  T.x_new = var(Var::x);
  T.u_new = var(Var::u);
  T.inverse = std::array<Expr, 3>{var(Var::t), var(Var::x), var(Var::u)};
  return T;
}

Expr Pullback::d_t(const Expr& e) const {
  return (Dx_x * total_derivative(e, Dir::t) - Dt_x * total_derivative(e, Dir::x)) / det;
}

Expr Pullback::d_x(const Expr& e) const {
  return (Dt_t * total_derivative(e, Dir::x) - Dx_t * total_derivative(e, Dir::t)) / det;
}

Pullback pullback(const PointTransformation& T) {
  Pullback p;
  p.Dt_t = total_derivative(T.t_new, Dir::t);
  p.Dx_t = total_derivative(T.t_new, Dir::x);
  p.Dt_x = total_derivative(T.x_new, Dir::t);
  p.Dx_x = total_derivative(T.x_new, Dir::x);
  p.det = p.Dt_t * p.Dx_x - p.Dx_t * p.Dt_x;
  if (p.det.is_zero()) throw Error("Jacobian of the transformation vanishes identically");
  Expr jac = diff(T.t_new, Var::t) * (diff(T.x_new, Var::x) * diff(T.u_new, Var::u) -
                                       diff(T.x_new, Var::u) * diff(T.u_new, Var::x)) -
             diff(T.t_new, Var::x) * (diff(T.x_new, Var::t) * diff(T.u_new, Var::u) -
                                       diff(T.x_new, Var::u) * diff(T.u_new, Var::t)) +
             diff(T.t_new, Var::u) * (diff(T.x_new, Var::t) * diff(T.u_new, Var::x) -
                                       diff(T.x_new, Var::x) * diff(T.u_new, Var::t));
  if (jac.is_zero()) throw Error("Jacobian of the transformation vanishes identically");
  return p;
}

namespace {

// Simultaneous change of variables. Routes through placeholder symbols so
// swaps such as t <-> x form an acyclic binding set.
Expr change_variables(const Expr& e, const Bindings& b) {
  Bindings rename, fill;
  int i = 0;
  for (const auto& [g, v] : b.leaves) {
    GenRef tmp = param_gen("__cv" + std::to_string(i++));
    rename.bind(g, Expr::from_gen(tmp));
    fill.bind(tmp, v);
  }
  return substitute(substitute(e, rename), fill);
}

Expr compose(const Expr& e, const PointTransformation& T) {
  Bindings b;
  b.bind(Var::t, T.t_new).bind(Var::x, T.x_new).bind(Var::u, T.u_new);
  return change_variables(e, b);
}

}  // namespace

Expr pull_back_equation(const EquationSpec& tgt, const PointTransformation& T) {
  Pullback p = pullback(T);
  Expr F = T.f_new ? *T.f_new : compose(tgt.f, T);
  Expr Hc = T.H_new ? *T.H_new : compose(tgt.H, T);
  Expr Kc = T.K_new ? *T.K_new : compose(tgt.K, T);
  Expr ut = p.d_t(T.u_new), ux = p.d_x(T.u_new);
  Expr r = F * p.d_t(ut) - p.d_x(Hc * ux) - Kc * ux;
  if (max_jet_order(r) > 2) throw Error("pullback exceeds jet order 2");
  return r;
}

EquivalenceResult verify_equivalence(const EquationSpec& src, const EquationSpec& tgt, const PointTransformation& T) {
  EquivalenceResult res;
  Expr R = pull_back_equation(tgt, T);
  Expr d = delta(src);
  GenRef uxx = jet_gen(0, 2), utt = jet_gen(2, 0);
  res.multiplier = diff(R, uxx) / diff(d, uxx);
  if (res.multiplier.is_zero()) {
    res.note = "pulled-back equation has no u_xx term";
    res.verdict.grade = Grade::NonZero;
    return res;
  }
  Expr rest = R - res.multiplier * d;
  if (!rest.is_zero()) {
    // f~ given through its log-derivative is fixed only up to a constant
    // factor; accept a constant ratio on the u_tt coefficient.
    Expr ctt = diff(rest, utt);
    Expr other = rest - ctt * jet(2, 0);
    bool log_rule = false;
    for (GenRef g : leaves(R))
      if (g->kind == GenKind::Func && g->fn->mode == FunctionSpec::Mode::LogDerivative) log_rule = true;
    if (log_rule && other.is_zero() && !ctt.is_zero()) {
      Expr ratio = diff(R, utt) / (res.multiplier * diff(d, utt));
      bool constant = true;
      for (Var v : {Var::t, Var::x, Var::u}) constant &= diff(ratio, v).is_zero();
      for (GenRef g : leaves(ratio)) constant &= g->kind != GenKind::Jet;
      if (constant) {
        res.f_scale = Expr(1) / ratio;
        res.note = "holds after rescaling the target f by a constant";
        rest = Expr();
      }
    }
  }
  SampleDomain dom = sample_domain(src);
  for (const auto& c : tgt.constraints) dom.constraints.push_back(c);
  res.verdict = is_zero(rest, ZeroMode::Auto, dom);
  res.holds = res.verdict.zero();
  if (max_jet_order(res.multiplier) > 0 && res.note.empty()) res.note = "multiplier depends on jets";
  return res;
}

GroupAction apply_equivalence_group(const EquationSpec& eq, const std::array<Expr, 7>& eps) {
  for (int i = 3; i < 7; ++i)
    if (eps[static_cast<std::size_t>(i)].is_zero())
      throw Error("scaling parameter epsilon_" + std::to_string(i + 1) + " is zero");
  const Expr &e1 = eps[0], &e2 = eps[1], &e3 = eps[2], &e4 = eps[3], &e5 = eps[4], &e6 = eps[5], &e7 = eps[6];
  Expr t = var(Var::t), x = var(Var::x), u = var(Var::u);
  GroupAction g;
  g.map.t_new = e4 * t + e1;
  g.map.x_new = e5 * x + e2;
  g.map.u_new = e6 * u + e3;
  g.map.inverse = std::array<Expr, 3>{(t - e1) / e4, (x - e2) / e5, (u - e3) / e6};
  Expr x_old = (x - e2) / e5, u_old = (u - e3) / e6;
  g.image.id = eq.id + "~";
  g.image.f = e4 * e4 / (e5 * e5) * e7 * substitute(eq.f, Bindings().bind(Var::x, x_old));
  g.image.H = e7 * substitute(eq.H, Bindings().bind(Var::u, u_old));
  g.image.K = e7 / e5 * substitute(eq.K, Bindings().bind(Var::u, u_old));
  g.image.constraints = eq.constraints;
  return g;
}

namespace {

struct Antiderivative {
  Expr value;
  std::optional<Expr> inverse;  // u as a function of u~, written with u
  std::optional<Expr> exponent;
};

// int H du for the families c*exp(a*u), c*u^p and opaque H.
Antiderivative integrate_H(const Expr& H) {
  Expr u = var(Var::u);
  GenRef ug = var_gen(Var::u);
  Expr Hu = diff(H, Var::u);
  Antiderivative a;
  if (H.is_zero()) throw Error("H vanishes");
  Expr logd = Hu / H;
  // exp family: H'/H constant.
  if (!depends_on(logd, ug)) {
    if (logd.is_zero()) {
      a.value = H * u;
      a.inverse = u / H;
      return a;
    }
    a.value = H / logd;
    Expr c = H / exp(logd * u);
    a.inverse = ln(u * logd / c) / logd;
    return a;
  }
  // power family: u H'/H constant.
  Expr p = u * logd;
  if (!depends_on(p, ug)) {
    Expr c = H / pow(u, p);
    if ((p + Expr(1)).is_zero()) {
      a.value = c * ln(u);
      a.inverse = exp(u / c);
    } else {
      a.value = c * pow(u, p + Expr(1)) / (p + Expr(1));
      a.inverse = pow((p + Expr(1)) * u / c, Expr(1) / (p + Expr(1)));
      a.exponent = -p / (p + Expr(1));
    }
    return a;
  }
  auto gens = generators(H);
  if (gens.size() == 1 && gens[0]->kind == GenKind::Func && gens[0]->fn->name == "H" && H == Expr::from_gen(gens[0])) {
    a.value = func(std_function("IH"), {u});
    return a;
  }
  throw Error("antiderivative of H is not available in closed form: " + to_string(H));
}

}  // namespace

HodographResult hodograph_wave_transform(const EquationSpec& eq) {
  if (!eq.K.is_zero()) throw Error("hodograph transformation needs K = 0");
  if (!(eq.f == Expr(1))) throw Error("hodograph transformation needs f = 1");
  Antiderivative a = integrate_H(eq.H);
  HodographResult r;
  r.map.t_new = var(Var::x);
  r.map.x_new = var(Var::t);
  r.map.u_new = a.value;
  r.map.H_new = Expr(1) / eq.H;
  r.map.K_new = Expr();
  r.map.f_new = Expr(1);
  r.target.id = eq.id + "^h";
  r.target.f = Expr(1);
  r.target.K = Expr();
  r.target.constraints = eq.constraints;
  if (a.inverse) {
    Expr h = Expr(1) / substitute(eq.H, Bindings().bind(Var::u, *a.inverse));
    r.target_H = h;
    r.target.H = h;
    r.map.inverse = std::array<Expr, 3>{var(Var::x), var(Var::t), *a.inverse};
  } else {
    r.target.H = Expr(1) / func(std_function("H"), {func(make_opaque("Hinv"), {var(Var::u)})});
  }
  r.exponent = a.exponent;
  return r;
}

Expr in_old_variables(const Expr& e, const PointTransformation& T) { return compose(e, T); }

PointTransformation inverse_of(const PointTransformation& T) {
  if (!T.inverse) throw Error("transformation has no explicit inverse");
  PointTransformation S;
  S.t_new = (*T.inverse)[0];
  S.x_new = (*T.inverse)[1];
  S.u_new = (*T.inverse)[2];
  S.inverse = std::array<Expr, 3>{T.t_new, T.x_new, T.u_new};
  S.chart = T.chart;
  return S;
}

Expr to_new_variables(const Expr& e, const PointTransformation& T) {
  PointTransformation S = inverse_of(T);
  Bindings b;
  b.bind(Var::t, S.t_new).bind(Var::x, S.x_new).bind(Var::u, S.u_new);
  int order = max_jet_order(e);
  if (order > 0) {
    Pullback p = pullback(S);
    Expr ut = p.d_t(S.u_new), ux = p.d_x(S.u_new);
    b.bind(jet_gen(1, 0), ut).bind(jet_gen(0, 1), ux);
    if (order > 1) {
      b.bind(jet_gen(2, 0), p.d_t(ut)).bind(jet_gen(1, 1), p.d_x(ut)).bind(jet_gen(0, 2), p.d_x(ux));
    }
    if (order > 2) throw Error("rewriting supports jets up to order 2");
  }
  return change_variables(e, b);
}

VectorField push_forward(const VectorField& q, const PointTransformation& T) {
  auto act = [&](const Expr& F) { return q.tau * diff(F, Var::t) + q.xi * diff(F, Var::x) + q.eta * diff(F, Var::u); };
  return {to_new_variables(act(T.t_new), T), to_new_variables(act(T.x_new), T), to_new_variables(act(T.u_new), T)};
}

ConservedVector transform_conserved_vector(const ConservedVector& cv, const PointTransformation& T) {
  Pullback p = pullback(T);
  ConservedVector g{(cv.T * p.Dt_t + cv.X * p.Dx_t) / p.det, (cv.T * p.Dt_x + cv.X * p.Dx_x) / p.det};
  if (T.inverse) {
    g.T = to_new_variables(g.T, T);
    g.X = to_new_variables(g.X, T);
  }
  return g;
}

}  // namespace liesym
