#include "liesym/detsys.hpp"

#include <algorithm>
#include <map>

#include "liesym/function.hpp"

namespace liesym {

namespace {

void require_only(const Expr& e, std::initializer_list<Var> allowed, const char* what) {
  for (GenRef g : leaves(e)) {
    if (g->kind == GenKind::Jet) throw Error(std::string(what) + " depends on jet variables");
    if (g->kind == GenKind::Var &&
        std::find(allowed.begin(), allowed.end(), static_cast<Var>(g->a)) == allowed.end())
      throw Error(std::string(what) + " depends on " + var_name(static_cast<Var>(g->a)));
  }
}

Expr monomial_expr(const Monomial& m) {
  Expr r(1);
  for (const auto& f : m) r = r * pow(Expr::from_gen(f.gen), f.exp);
  return r;
}

}  // namespace

void EquationSpec::validate() const {
  require_only(f, {Var::x}, "f");
  require_only(H, {Var::u}, "H");
  require_only(K, {Var::u}, "K");
  if (f.is_zero() || H.is_zero()) throw Error("equation " + id + " violates f*H != 0");
  if (diff(H, Var::u).is_zero() && diff(K, Var::u).is_zero())
    throw Error("equation " + id + " violates (H_u, K_u) != (0, 0)");
}

EquationSpec generic_equation() {
  EquationSpec eq;
  eq.id = "generic";
  eq.f = func(std_function("f"), {var(Var::x)});
  eq.H = func(std_function("H"), {var(Var::u)});
  eq.K = func(std_function("K"), {var(Var::u)});
  return eq;
}

Expr delta(const EquationSpec& eq) {
  Expr ux = jet(0, 1);
  return eq.f * jet(2, 0) - eq.H * jet(0, 2) - diff(eq.H, Var::u) * ux * ux - eq.K * ux;
}

Expr solved_utt(const EquationSpec& eq) {
  Expr ux = jet(0, 1);
  return (eq.H * jet(0, 2) + diff(eq.H, Var::u) * ux * ux + eq.K * ux) / eq.f;
}

Expr eliminate_utt(const EquationSpec& eq, const Expr& e) {
  bool ttt = depends_on(e, jet_gen(3, 0)), ttx = depends_on(e, jet_gen(2, 1)), tt = depends_on(e, jet_gen(2, 0));
  if (!ttt && !ttx && !tt) return e;
  Expr s = solved_utt(eq);
  Bindings b;
  if (tt) b.bind(jet_gen(2, 0), s);
  if (ttt) b.bind(jet_gen(3, 0), total_derivative(s, Dir::t));
  if (ttx) b.bind(jet_gen(2, 1), total_derivative(s, Dir::x));
  return substitute(e, b);
}

SampleDomain sample_domain(const EquationSpec& eq) {
  SampleDomain d;
  d.constraints = eq.constraints;
  return d;
}

Expr invariance_residual(const EquationSpec& eq, const VectorField& q) {
  return eliminate_utt(eq, apply_prolonged(q, delta(eq)));
}

ZeroVerdict check_symmetry(const EquationSpec& eq, const VectorField& q, ZeroMode mode) {
  return is_zero(invariance_residual(eq, q), mode, sample_domain(eq));
}

VectorField generic_field() {
  std::vector<Expr> txu{var(Var::t), var(Var::x), var(Var::u)};
  return {func(std_function("tau"), txu), func(std_function("xi"), txu), func(std_function("eta"), txu)};
}

bool is_unknown(GenRef g) {
  if (g->kind != GenKind::Func) return false;
  const FunctionSpec* fn = g->fn.get();
  return fn == std_function("tau").get() || fn == std_function("xi").get() || fn == std_function("eta").get();
}

DeterminingSystem split_residual(const Expr& residual) {
  std::vector<GenRef> jets;
  for (GenRef g : leaves(residual))
    if (g->kind == GenKind::Jet) jets.push_back(g);
  std::vector<std::pair<Monomial, Expr>> parts;
  try {
    parts = coefficients_in(numerator(residual), jets);
  } catch (const Error& e) {
    throw Error(std::string("residual is not polynomial in jet variables: ") + e.what());
  }
  DeterminingSystem sys;
  for (auto& [m, c] : parts) {
    sys.equations.push_back(c);
    sys.monomials.push_back(to_string(monomial_expr(m)));
  }
  return sys;
}

DeterminingSystem derive_determining_system(const EquationSpec& eq) {
  return split_residual(invariance_residual(eq, generic_field()));
}

namespace {

using Row = std::map<GenRef, Expr, bool (*)(GenRef, GenRef)>;

bool gen_less(GenRef a, GenRef b) { return compare(a, b) > 0; }

std::vector<GenRef> unknowns_in(const Expr& e) {
  std::vector<GenRef> out;
  for (GenRef g : generators(e))
    if (is_unknown(g)) out.push_back(g);
  return out;
}

Row to_row(const Expr& e) {
  Row r(gen_less);
  Expr rest = e;
  for (GenRef g : unknowns_in(e)) {
    Expr c = diff(e, g);
    for (GenRef h : generators(c))
      if (is_unknown(h)) throw Error("determining equation is not linear in the unknowns: " + to_string(e));
    r.emplace(g, c);
    rest = rest - c * Expr::from_gen(g);
  }
  if (!rest.is_zero()) throw Error("determining equation has an inhomogeneous part: " + to_string(e));
  return r;
}

class Echelon {
 public:
  // Reduces r against the basis; returns the remainder.
  Row reduce(Row r) const {
    for (const auto& b : rows_) {
      auto it = r.find(b.first);
      if (it == r.end()) continue;
      Expr c = it->second;
      for (const auto& [g, v] : b.second) {
        Expr nv = (r.count(g) ? r.at(g) : Expr()) - c * v;
        if (nv.is_zero())
          r.erase(g);
        else
          r.insert_or_assign(g, nv);
      }
    }
    return r;
  }

  bool add(const Row& row) {
    Row r = reduce(row);
    if (r.empty()) return false;
    GenRef p = r.begin()->first;
    Expr inv = Expr(1) / r.begin()->second;
    for (auto& [g, v] : r) v = v * inv;
    for (auto& b : rows_) {
      auto it = b.second.find(p);
      if (it == b.second.end()) continue;
      Expr c = it->second;
      for (const auto& [g, v] : r) {
        Expr nv = (b.second.count(g) ? b.second.at(g) : Expr()) - c * v;
        if (nv.is_zero())
          b.second.erase(g);
        else
          b.second.insert_or_assign(g, nv);
      }
    }
    rows_.emplace_back(p, std::move(r));
    return true;
  }

  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<std::pair<GenRef, Row>> rows_;
};

std::vector<Expr> closure(const std::vector<Expr>& eqs, int order) {
  std::vector<Expr> out = eqs, layer = eqs;
  for (int k = 0; k < order; ++k) {
    std::vector<Expr> next;
    for (const auto& e : layer)
      for (Var v : {Var::t, Var::x, Var::u}) {
        Expr d = diff(e, v);
        if (!d.is_zero()) next.push_back(d);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

}  // namespace

Expr normalize_equation(const Expr& e) {
  auto us = unknowns_in(e);
  if (us.empty()) return e;
  GenRef lead = *std::max_element(us.begin(), us.end(), [](GenRef a, GenRef b) { return compare(a, b) < 0; });
  return e / diff(e, lead);
}

std::vector<Expr> non_classifying(const DeterminingSystem& sys) {
  std::vector<Expr> out;
  for (const auto& e : sys.equations) {
    Expr n = normalize_equation(e);
    bool free = true;
    for (GenRef g : leaves(n))
      if (g->kind == GenKind::Func && !is_unknown(g)) free = false;
    if (free && !n.is_zero()) out.push_back(n);
  }
  return out;
}

Bindings integrated_ansatz() {
  static const FunctionRef T = make_opaque("T"), X = make_opaque("X"), A = make_opaque("A"),
                           E = make_opaque("E", 2);
  Expr t = var(Var::t), x = var(Var::x), u = var(Var::u);
  Bindings b;
  b.bind_function("tau", {Var::t, Var::x, Var::u}, func(T, {t}));
  b.bind_function("xi", {Var::t, Var::x, Var::u}, func(X, {x}));
  b.bind_function("eta", {Var::t, Var::x, Var::u},
                  (func(T, {t}, {1}) / Expr(2) + func(A, {x})) * u + func(E, {t, x}));
  return b;
}

ZeroVerdict verify_integrated_form(const DeterminingSystem& sys, const Bindings& ansatz) {
  ZeroVerdict v;
  v.grade = Grade::SymbolicZero;
  auto sub = non_classifying(sys);
  if (sub.empty()) {
    v.grade = Grade::Skipped;
    v.reason = "no element-free equations in the system";
    return v;
  }
  for (const auto& e : sub) {
    ZeroVerdict z = is_zero(substitute(e, ansatz), ZeroMode::Auto);
    if (!z.zero() && z.reason.empty()) z.reason = "fails " + to_string(e) + " = 0";
    v = combine(v, z);
  }
  return v;
}

SpanReport compare_systems(const std::vector<Expr>& a, const std::vector<Expr>& b, int order) {
  SpanReport rep;
  Echelon ea, eb;
  for (const auto& e : closure(a, order)) ea.add(to_row(e));
  for (const auto& e : closure(b, order)) eb.add(to_row(e));
  rep.rank_a = ea.rank();
  rep.rank_b = eb.rank();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eb.reduce(to_row(a[i])).empty()) rep.a_outside_b.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!ea.reduce(to_row(b[i])).empty()) rep.b_outside_a.push_back(static_cast<int>(i));
  rep.equivalent = rep.a_outside_b.empty() && rep.b_outside_a.empty();
  return rep;
}

KernelResult kernel_candidates(const EquationSpec& eq) {
  Expr t = var(Var::t), x = var(Var::x), u = var(Var::u);
  const std::vector<Expr> monos{Expr(1), t, x, u, t * t, t * x, t * u, x * x, x * u, u * u};
  std::vector<GenRef> cs;
  Expr comp[3];
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < monos.size(); ++i) {
      GenRef c = param_gen("kc" + std::to_string(cs.size()));
      cs.push_back(c);
      comp[k] = comp[k] + Expr::from_gen(c) * monos[i];
    }
  Expr n = numerator(invariance_residual(eq, {comp[0], comp[1], comp[2]}));
  auto index_of = [&](GenRef g) -> int {
    auto it = std::find(cs.begin(), cs.end(), g);
    return it == cs.end() ? -1 : static_cast<int>(it - cs.begin());
  };
  // Group by the monomial in every other symbol; coefficients are linear forms in the c's.
  std::vector<std::pair<Monomial, std::vector<Rational>>> rows;
  for (const auto& term : n.num()) {
    Monomial key;
    int col = -1;
    for (const auto& f : term.mono) {
      int j = index_of(f.gen);
      if (j >= 0) {
        if (col >= 0 || f.exp != 1) throw Error("kernel residual is not linear in the candidate coefficients");
        col = j;
      } else {
        if (f.gen->kind == GenKind::Pow || f.gen->kind == GenKind::Ln || f.gen->kind == GenKind::Func)
          for (GenRef c : cs)
            if (f.gen->depends_on(c)) throw Error("candidate coefficient inside a kernel");
        key.push_back(f);
      }
    }
    if (col < 0) throw Error("kernel residual has a part free of candidate coefficients");
    auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) {
      if (r.first.size() != key.size()) return false;
      for (std::size_t i = 0; i < key.size(); ++i)
        if (r.first[i].gen != key[i].gen || r.first[i].exp != key[i].exp) return false;
      return true;
    });
    if (it == rows.end()) {
      rows.push_back({key, std::vector<Rational>(cs.size(), Rational(0))});
      it = rows.end() - 1;
    }
    it->second[static_cast<std::size_t>(col)] += term.coef;
  }
  // Reduced row echelon form over Q.
  std::size_t ncol = cs.size();
  std::vector<std::vector<Rational>> m;
  for (auto& r : rows) m.push_back(r.second);
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < ncol && rank < m.size(); ++c) {
    std::size_t p = rank;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[rank]);
    Rational inv = 1 / m[rank][c];
    for (auto& v : m[rank]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      Rational k = m[r][c];
      for (std::size_t j = 0; j < ncol; ++j) m[r][j] -= k * m[rank][j];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++rank;
  }
  KernelResult res;
  res.candidates = static_cast<int>(ncol);
  res.equations = static_cast<int>(rows.size());
  for (std::size_t free = 0; free < ncol; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), static_cast<int>(free)) != pivot_col.end()) continue;
    std::vector<Rational> v(ncol, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < rank; ++r) v[static_cast<std::size_t>(pivot_col[r])] = -m[r][free];
    Expr parts[3];
    for (std::size_t j = 0; j < ncol; ++j)
      if (v[j] != 0) parts[j / monos.size()] = parts[j / monos.size()] + Expr(v[j]) * monos[j % monos.size()];
    res.basis.push_back({parts[0], parts[1], parts[2]});
  }
  return res;
}

Expr element_f() { return element("f"); }
Expr element_H() { return element("H"); }
Expr element_K() { return element("K"); }

namespace {

struct ExtendedContext {
  bool H_live, K_live;
  Expr F, He, Hu, Ke, Ku;
  Expr fx = element("f_x"), Hu_el = element("H_u"), Ku_el = element("K_u");

  explicit ExtendedContext(const ExtendedClass& cls) {
    H_live = !cls.H.has_value();
    K_live = !cls.K.has_value() && !cls.K_equals_H;
    F = element_f();
    He = H_live ? element_H() : *cls.H;
    Hu = H_live ? Hu_el : diff(*cls.H, Var::u);
    if (cls.K) {
      Ke = *cls.K;
      Ku = diff(*cls.K, Var::u);
    } else if (cls.K_equals_H) {
      Ke = He;
      Ku = Hu;
    } else {
      Ke = element_K();
      Ku = Ku_el;
    }
  }

  void no_derivative_elements(const Expr& e) const {
    for (GenRef g : {element_gen("f_x"), element_gen("H_u"), element_gen("K_u")})
      if (depends_on(e, g)) throw Error("operator coefficient depends on a derivative of an arbitrary element");
  }

  Expr d_f(const Expr& e) const { return diff(e, element_gen("f")); }
  Expr d_H(const Expr& e) const { return H_live ? diff(e, element_gen("H")) : Expr(); }
  Expr d_K(const Expr& e) const { return K_live ? diff(e, element_gen("K")) : Expr(); }

  // Total derivatives on the jet space of u with f(x), H(u), K(u).
  Expr D(const Expr& e, Dir d) const {
    Expr uj = d == Dir::t ? jet(1, 0) : jet(0, 1);
    Expr r = total_derivative(e, d) + (d_H(e) * Hu_el + diff(e, element_gen("H_u")) * element("H_uu")) * uj +
             (d_K(e) * Ku_el + diff(e, element_gen("K_u")) * element("K_uu")) * uj;
    if (d == Dir::x) r = r + d_f(e) * fx + diff(e, element_gen("f_x")) * element("f_xx");
    return r;
  }
  Expr D(const Expr& e, int nt, int nx) const {
    Expr r = e;
    for (int i = 0; i < nt; ++i) r = D(r, Dir::t);
    for (int i = 0; i < nx; ++i) r = D(r, Dir::x);
    return r;
  }
  // Total derivatives on the extended base space (t, x, u) restricted to
  // f_t = f_u = H_t = H_x = K_t = K_x = 0.
  Expr Dhat(const Expr& e, Var v) const {
    no_derivative_elements(e);
    Expr r = diff(e, v);
    if (v == Var::x) r = r + d_f(e) * fx;
    if (v == Var::u) r = r + d_H(e) * Hu_el + d_K(e) * Ku_el;
    return r;
  }
};

}  // namespace

std::vector<Expr> extended_invariance_residual(const ExtendedField& X, const ExtendedClass& cls) {
  ExtendedContext c(cls);
  if (!c.H_live && !X.rho.is_zero()) throw Error("operator acts on H, which the class fixes");
  if (!c.K_live && !X.phi.is_zero()) throw Error("operator acts on K, which the class fixes or ties to H");
  Expr ux = jet(0, 1);
  Expr d = c.F * jet(2, 0) - c.He * jet(0, 2) - c.Hu * ux * ux - c.Ke * ux;
  Expr w = X.eta - X.tau * jet(1, 0) - X.xi * jet(0, 1);
  std::vector<Expr> parts{X.tau * diff(d, Var::t), X.xi * diff(d, Var::x), X.eta * diff(d, Var::u),
                          X.pi * diff(d, element_gen("f"))};
  if (c.H_live) {
    parts.push_back(X.rho * diff(d, element_gen("H")));
    Expr rho_u = c.Dhat(X.rho, Var::u) - c.Hu_el * c.Dhat(X.eta, Var::u);
    parts.push_back(rho_u * diff(d, element_gen("H_u")));
  }
  if (c.K_live) parts.push_back(X.phi * diff(d, element_gen("K")));
  const std::pair<int, int> idx[] = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (auto [nt, nx] : idx) {
    Expr dd = diff(d, jet_gen(nt, nx));
    if (dd.is_zero()) continue;
    Expr eta_j = c.D(w, nt, nx) + X.tau * jet(nt + 1, nx) + X.xi * jet(nt, nx + 1);
    parts.push_back(eta_j * dd);
  }
  Expr main = sum(std::move(parts));
  Expr s = (c.He * jet(0, 2) + c.Hu * ux * ux + c.Ke * ux) / c.F;
  main = substitute(main, Bindings().bind(jet_gen(2, 0), s));

  std::vector<Expr> out{main};
  out.push_back(c.Dhat(X.pi, Var::t) - c.fx * c.Dhat(X.xi, Var::t));
  out.push_back(c.Dhat(X.pi, Var::u) - c.fx * c.Dhat(X.xi, Var::u));
  if (c.H_live) {
    out.push_back(c.Dhat(X.rho, Var::t) - c.Hu_el * c.Dhat(X.eta, Var::t));
    out.push_back(c.Dhat(X.rho, Var::x) - c.Hu_el * c.Dhat(X.eta, Var::x));
  }
  if (c.K_live) {
    out.push_back(c.Dhat(X.phi, Var::t) - c.Ku_el * c.Dhat(X.eta, Var::t));
    out.push_back(c.Dhat(X.phi, Var::x) - c.Ku_el * c.Dhat(X.eta, Var::x));
  }
  return out;
}

std::string to_string(const ExtendedField& X) {
  std::string s;
  const std::pair<const Expr*, const char*> parts[] = {{&X.tau, "d_t"}, {&X.xi, "d_x"}, {&X.eta, "d_u"},
                                                       {&X.pi, "d_f"},  {&X.rho, "d_H"}, {&X.phi, "d_K"}};
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
