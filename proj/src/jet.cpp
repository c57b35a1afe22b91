#include "liesym/jet.hpp"

namespace liesym {

namespace {

// Jets u_J present in e, plus u itself as (0,0).
std::vector<std::pair<int, int>> jets_in(const Expr& e) {
  std::vector<std::pair<int, int>> js;
  for (GenRef g : leaves(e))
    if (g->kind == GenKind::Jet) js.emplace_back(g->a, g->b);
  return js;
}

}  // namespace

Expr total_derivative(const Expr& e, Dir d, int max_order) {
  Var base = d == Dir::t ? Var::t : Var::x;
  int dt = d == Dir::t ? 1 : 0, dx = 1 - dt;
  std::vector<Expr> parts{diff(e, base)};
  Expr du = diff(e, Var::u);
  if (!du.is_zero()) parts.push_back(du * jet(dt, dx));
  for (auto [nt, nx] : jets_in(e)) {
    Expr de = diff(e, jet_gen(nt, nx));
    if (de.is_zero()) continue;
    if (nt + nx + 1 > max_order)
      throw Error("total derivative exceeds jet order " + std::to_string(max_order));
    parts.push_back(de * jet(nt + dt, nx + dx));
  }
  return sum(std::move(parts));
}

Expr total_derivative(const Expr& e, int nt, int nx, int max_order) {
  Expr r = e;
  for (int i = 0; i < nt; ++i) r = total_derivative(r, Dir::t, max_order);
  for (int i = 0; i < nx; ++i) r = total_derivative(r, Dir::x, max_order);
  return r;
}

Expr characteristic(const VectorField& q) { return q.eta - q.tau * jet(1, 0) - q.xi * jet(0, 1); }

ProlongedField prolong2(const VectorField& q) {
  Expr w = characteristic(q);
  auto eta_j = [&](int nt, int nx) {
    return total_derivative(w, nt, nx) + q.tau * jet(nt + 1, nx) + q.xi * jet(nt, nx + 1);
  };
  return {eta_j(1, 0), eta_j(0, 1), eta_j(2, 0), eta_j(1, 1), eta_j(0, 2)};
}

Expr apply_prolonged(const VectorField& q, const ProlongedField& p, const Expr& e) {
  if (max_jet_order(e) > 2) throw Error("second prolongation applied to an expression of jet order > 2");
  std::vector<Expr> parts{q.tau * diff(e, Var::t), q.xi * diff(e, Var::x), q.eta * diff(e, Var::u)};
  const std::pair<int, int> idx[] = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  const Expr* coef[] = {&p.eta_t, &p.eta_x, &p.eta_tt, &p.eta_tx, &p.eta_xx};
  for (int i = 0; i < 5; ++i) {
    Expr de = diff(e, jet_gen(idx[i].first, idx[i].second));
    if (!de.is_zero()) parts.push_back(*coef[i] * de);
  }
  return sum(std::move(parts));
}

Expr apply_prolonged(const VectorField& q, const Expr& e) { return apply_prolonged(q, prolong2(q), e); }

Expr apply_evolutionary(const EvolutionaryField& v, const Expr& e, int max_order) {
  std::vector<Expr> parts{v.eta * diff(e, Var::u)};
  for (auto [nt, nx] : jets_in(e)) {
    Expr de = diff(e, jet_gen(nt, nx));
    if (de.is_zero()) continue;
    parts.push_back(total_derivative(v.eta, nt, nx, max_order) * de);
  }
  return sum(std::move(parts));
}

Expr substitute_jets(const Expr& e, const Expr& u) {
  Bindings b;
  b.bind(Var::u, u);
  for (GenRef g : leaves(e)) {
    if (g->kind != GenKind::Jet) continue;
    b.bind(g, diff(diff(u, Var::t, g->a), Var::x, g->b));
  }
  return substitute(e, b);
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a.tau + b.tau, a.xi + b.xi, a.eta + b.eta};
}

VectorField operator*(const Expr& c, const VectorField& a) { return {c * a.tau, c * a.xi, c * a.eta}; }

bool operator==(const VectorField& a, const VectorField& b) {
  return a.tau == b.tau && a.xi == b.xi && a.eta == b.eta;
}

std::string to_string(const VectorField& q) {
  std::string s;
  const std::pair<const Expr*, const char*> parts[] = {{&q.tau, "d_t"}, {&q.xi, "d_x"}, {&q.eta, "d_u"}};
  for (const auto& [c, name] : parts) {
    if (c->is_zero()) continue;
    if (!s.empty()) s += " + ";
    if (*c == Expr(1))
      s += name;
    else
      s += "(" + to_string(*c) + ")*" + name;
  }
  return s.empty() ? "0" : s;
}

}  // namespace liesym
