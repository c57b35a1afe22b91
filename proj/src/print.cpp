#include <ostream>
#include <sstream>

#include "expr_internal.hpp"
#include "liesym/expr.hpp"
#include "liesym/function.hpp"

namespace liesym {

using namespace detail;

namespace {

std::string print_poly(const Poly& p);

std::string atom_string(GenRef g) {
  switch (g->kind) {
    case GenKind::Var: return var_name(static_cast<Var>(g->a));
    case GenKind::Jet: return "u_" + std::string(static_cast<std::size_t>(g->a), 't') +
                              std::string(static_cast<std::size_t>(g->b), 'x');
    case GenKind::Param:
    case GenKind::Element: return g->name;
    case GenKind::Func: {
      std::string s;
      bool any = false;
      for (int d : g->deriv) any |= d != 0;
      if (g->args.size() == 1) {
        s = g->name + std::string(static_cast<std::size_t>(g->deriv[0]), '\'');
      } else if (any) {
        s = "D[";
        for (std::size_t i = 0; i < g->deriv.size(); ++i) s += (i ? "," : "") + std::to_string(g->deriv[i]);
        s += "]" + g->name;
      } else {
        s = g->name;
      }
      s += "(";
      for (std::size_t i = 0; i < g->args.size(); ++i) s += (i ? ", " : "") + to_string(g->args[i]);
      return s + ")";
    }
    case GenKind::Ln: return "ln(" + to_string(g->args[0]) + ")";
    case GenKind::Sin: return "sin(" + to_string(g->args[0]) + ")";
    case GenKind::Cos: return "cos(" + to_string(g->args[0]) + ")";
    case GenKind::Atan: return "atan(" + to_string(g->args[0]) + ")";
    case GenKind::Pow: break;
  }
  return "?";
}

std::string base_string(const BaseSpec& b) {
  switch (b.kind) {
    case BaseKind::E: return "exp";
    case BaseKind::Atom: return atom_string(b.atom);
    case BaseKind::Prime: return b.prime.get_str();
    case BaseKind::Compound: return "(" + print_poly(b.poly.num()) + ")";
  }
  return "?";
}

std::string power_string(const BaseSpec& b, const Expr& X) {
  if (b.kind == BaseKind::E) return "exp(" + to_string(X) + ")";
  return base_string(b) + "^(" + to_string(X) + ")";
}

void term_parts(const Term& t, std::vector<std::string>& up, std::vector<std::string>& down) {
  const Monomial& m = t.mono;
  std::vector<bool> done(m.size(), false);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (done[i]) continue;
    GenRef g = m[i].gen;
    if (g->kind != GenKind::Pow) {
      bool family = false;
      for (std::size_t j = i + 1; j < m.size(); ++j)
        if (m[j].gen->kind == GenKind::Pow && m[j].gen->base_kind == BaseKind::Atom && m[j].gen->base_atom == g)
          family = true;
      if (!family) {
        int e = m[i].exp;
        std::string s = atom_string(g);
        if (std::abs(e) != 1) s += "^" + std::to_string(std::abs(e));
        (e > 0 ? up : down).push_back(s);
        done[i] = true;
        continue;
      }
    }
    BaseSpec b = base_of(g);
    Expr total;
    for (std::size_t j = i; j < m.size(); ++j) {
      if (done[j] || !same_base(base_of(m[j].gen), b)) continue;
      total += total_exponent(m[j].gen, m[j].exp);
      done[j] = true;
    }
    auto q = total.as_rational();
    if (q && q->get_den() == 1 && b.kind == BaseKind::Atom) {
      long e = q->get_num().get_si();
      std::string s = atom_string(b.atom);
      if (std::labs(e) != 1) s += "^" + std::to_string(std::labs(e));
      (e > 0 ? up : down).push_back(s);
    } else {
      up.push_back(power_string(b, total));
    }
  }
}

std::string print_term(const Term& t, bool first) {
  std::vector<std::string> up, down;
  term_parts(t, up, down);
  Rational c = abs(t.coef);
  std::string s;
  if (t.coef < 0)
    s = first ? "-" : " - ";
  else if (!first)
    s = " + ";
  Integer num = c.get_num(), den = c.get_den();
  std::string body;
  if (num != 1 || up.empty()) body = num.get_str();
  for (const auto& p : up) body += (body.empty() ? "" : "*") + p;
  if (den != 1) down.insert(down.begin(), den.get_str());
  if (!down.empty()) {
    std::string d;
    for (const auto& p : down) d += (d.empty() ? "" : "*") + p;
    body += "/" + (down.size() == 1 ? d : "(" + d + ")");
  }
  return s + body;
}

std::string print_poly(const Poly& p) {
  if (p.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += print_term(p[i], i == 0);
  return s;
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string n = print_poly(e.num());
  if (e.den().empty()) return n;
  std::string s = e.num().size() == 1 ? n : "(" + n + ")";
  for (const auto& d : e.den()) s += "*(" + print_poly(d.poly) + ")^(" + std::to_string(-d.mult) + ")";
  return s;
}

std::string to_string(GenRef g) {
  if (g->kind == GenKind::Pow) return power_string(base_of(g), g->piece);
  return atom_string(g);
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace liesym
