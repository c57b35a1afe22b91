#include "liesym/numeric.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "expr_internal.hpp"
#include "liesym/function.hpp"
#include "liesym/parse.hpp"

namespace liesym {

namespace {
std::uint64_t g_default_seed = 0x5EED;
}

std::uint64_t default_seed() { return g_default_seed; }
void set_default_seed(std::uint64_t seed) { g_default_seed = seed; }


using namespace detail;

bool ParamConstraint::holds(const Rational& v) const {
  switch (op) {
    case Op::NotEqual:
      for (const auto& x : values)
        if (v == x) return false;
      return true;
    case Op::Equal: return v == values.at(0);
    case Op::InSet:
      for (const auto& x : values)
        if (v == x) return true;
      return false;
    case Op::Greater: return v > values.at(0);
    case Op::Less: return v < values.at(0);
  }
  return false;
}

std::string ParamConstraint::to_string() const {
  std::string s = name;
  auto list = [&] {
    std::string r;
    for (std::size_t i = 0; i < values.size(); ++i) r += (i ? ", " : "") + values[i].get_str();
    return r;
  };
  switch (op) {
    case Op::NotEqual: return s + " != " + list();
    case Op::Equal: return s + " = " + list();
    case Op::InSet: return s + " in {" + list() + "}";
    case Op::Greater: return s + " > " + list();
    case Op::Less: return s + " < " + list();
  }
  return s;
}

ParamConstraint parse_constraint(const std::string& text) {
  ParamConstraint c;
  std::size_t p = 0;
  auto skip = [&] {
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
  };
  skip();
  std::size_t s = p;
  while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_')) ++p;
  c.name = text.substr(s, p - s);
  if (c.name.empty()) throw Error("constraint without a symbol: '" + text + "'");
  skip();
  std::string rest = text.substr(p);
  auto value = [&](const std::string& v) {
    Expr e = parse(v);
    auto q = e.as_rational();
    if (!q) throw Error("constraint value is not a rational constant: '" + v + "'");
    return *q;
  };
  if (rest.rfind("!=", 0) == 0) {
    c.op = ParamConstraint::Op::NotEqual;
    std::string list = rest.substr(2);
    std::size_t a = 0;
    while (a <= list.size()) {
      std::size_t b = list.find(',', a);
      if (b == std::string::npos) b = list.size();
      c.values.push_back(value(list.substr(a, b - a)));
      a = b + 1;
    }
  } else if (rest.rfind("in", 0) == 0) {
    c.op = ParamConstraint::Op::InSet;
    auto l = rest.find('{'), r = rest.find('}');
    if (l == std::string::npos || r == std::string::npos || r < l) throw Error("malformed set constraint: '" + text + "'");
    std::string list = rest.substr(l + 1, r - l - 1);
    std::size_t a = 0;
    while (a <= list.size()) {
      std::size_t b = list.find(',', a);
      if (b == std::string::npos) b = list.size();
      c.values.push_back(value(list.substr(a, b - a)));
      a = b + 1;
    }
  } else if (rest.rfind("=", 0) == 0) {
    c.op = ParamConstraint::Op::Equal;
    c.values.push_back(value(rest.substr(1)));
  } else if (rest.rfind(">", 0) == 0) {
    c.op = ParamConstraint::Op::Greater;
    c.values.push_back(value(rest.substr(1)));
  } else if (rest.rfind("<", 0) == 0) {
    c.op = ParamConstraint::Op::Less;
    c.values.push_back(value(rest.substr(1)));
  } else {
    throw Error("malformed constraint: '" + text + "'");
  }
  return c;
}

namespace {

// splitmix64 stream.
std::uint64_t next_u64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double next_unit(std::uint64_t& s) { return static_cast<double>(next_u64(s) >> 11) * (1.0 / 9007199254740992.0); }

Real to_real(const Rational& q) {
  Real n(q.get_num().get_str()), d(q.get_den().get_str());
  return n / d;
}

struct Model {
  Real c0;
  std::vector<Real> a, d;
  std::vector<std::vector<Real>> b;
};

Model make_model(const std::string& name, int arity, std::uint64_t seed) {
  std::uint64_t s = seed ^ hash_string(name);
  Model m;
  Real total = 0;
  for (int j = 0; j < 3; ++j) {
    m.a.push_back(Real(0.3 + 0.7 * next_unit(s)));
    std::vector<Real> bj;
    for (int i = 0; i < arity; ++i) bj.push_back(Real(0.3 + next_unit(s)));
    m.b.push_back(bj);
    m.d.push_back(Real(6.283 * next_unit(s)));
    total += m.a.back();
  }
  m.c0 = total + Real(0.5 + next_unit(s));
  return m;
}

class Evaluator {
 public:
  explicit Evaluator(const Assignment& a) : a_(a) {}

  Real eval(const Expr& e) {
    Real n = eval_poly(e.num(), nullptr);
    for (const auto& d : e.den()) {
      Real v = eval_poly(d.poly, nullptr);
      guard_nonzero(v, "denominator");
      n /= boost::multiprecision::pow(v, d.mult);
    }
    return n;
  }

  Residual residual(const Expr& e) {
    Residual r;
    r.scale = 0;
    r.value = eval_poly(e.num(), &r.scale);
    for (const auto& d : e.den()) guard_nonzero(eval_poly(d.poly, nullptr), "denominator");
    return r;
  }

  Real log_integral(const FunctionSpec& fn, const Real& z, int steps) {
    Real x0 = to_real(fn.anchor);
    Assignment inner = a_;
    inner.margin = 0;
    GenRef v = var_gen(fn.var);
    auto r = [&](const Real& s) {
      inner.values[v] = s;
      Evaluator ev(inner);
      return ev.eval(fn.rule);
    };
    auto simpson = [&](int n) {
      Real h = (z - x0) / n, acc = 0;
      for (int i = 0; i < n; ++i) {
        Real s0 = x0 + h * i;
        acc += (r(s0) + 4 * r(s0 + h / 2) + r(s0 + h)) * h / 6;
      }
      return acc;
    };
    if (steps > 0) return simpson(steps);
    int n = 8;
    Real prev = simpson(n);
    for (;;) {
      n *= 2;
      Real cur = simpson(n);
      if (boost::multiprecision::abs(cur - prev) < Real(1e-13) * (1 + boost::multiprecision::abs(cur)) || n >= 4096)
        return cur;
      prev = cur;
    }
  }

 private:
  const Assignment& a_;
  std::unordered_map<GenRef, Real> memo_;
  std::unordered_map<const FunctionSpec*, Model> models_;

  void guard_nonzero(const Real& v, const char* what) {
    if (!boost::multiprecision::isfinite(v)) throw SingularPoint(std::string("non-finite ") + what);
    if (boost::multiprecision::abs(v) <= a_.margin || v == 0) throw SingularPoint(std::string("vanishing ") + what);
  }

  Real eval_poly(const Poly& p, Real* scale) {
    Real acc = 0;
    for (const auto& t : p) {
      Real term = to_real(t.coef);
      for (const auto& f : t.mono) {
        const Real& g = gen(f.gen);
        if (f.exp < 0) guard_nonzero(g, "generator in a denominator");
        term *= f.exp == 1 ? g : boost::multiprecision::pow(g, f.exp);
      }
      acc += term;
      if (scale) *scale += boost::multiprecision::abs(term);
    }
    return acc;
  }

  const Model& model(const FunctionSpec* fn) {
    auto it = models_.find(fn);
    if (it == models_.end()) it = models_.emplace(fn, make_model(fn->name, fn->arity, a_.model_seed)).first;
    return it->second;
  }

  Real opaque(const FunctionSpec* fn, const std::vector<int>& deriv, const std::vector<Real>& z) {
    const Model& m = model(fn);
    int order = 0;
    for (int d : deriv) order += d;
    Real v = order == 0 ? m.c0 : Real(0);
    const Real half_pi = boost::multiprecision::acos(Real(-1)) / 2;
    for (std::size_t j = 0; j < m.a.size(); ++j) {
      Real arg = m.d[j], coef = m.a[j];
      for (std::size_t i = 0; i < z.size(); ++i) {
        arg += m.b[j][i] * z[i];
        for (int k = 0; k < deriv[i]; ++k) coef *= m.b[j][i];
      }
      v += coef * boost::multiprecision::sin(arg + half_pi * order);
    }
    return v;
  }

  Real function(GenRef g) {
    const FunctionSpec* fn = g->fn.get();
    std::vector<Real> z;
    for (const auto& a : g->args) z.push_back(eval(a));
    switch (fn->mode) {
      case FunctionSpec::Mode::Opaque: return opaque(fn, g->deriv, z);
      case FunctionSpec::Mode::Antiderivative: {
        const FunctionSpec* in = fn->integrand.get();
        if (in->mode != FunctionSpec::Mode::Opaque) throw Error("antiderivative of a non-opaque function");
        const Model& m = model(in);
        Real v = m.c0 * z[0];
        for (std::size_t j = 0; j < m.a.size(); ++j)
          v -= m.a[j] / m.b[j][0] * boost::multiprecision::cos(m.b[j][0] * z[0] + m.d[j]);
        return v;
      }
      case FunctionSpec::Mode::LogDerivative: {
        if (fn->lower && z[0] <= to_real(*fn->lower)) throw SingularPoint("argument below the declared domain of " + fn->name);
        if (fn->upper && z[0] >= to_real(*fn->upper)) throw SingularPoint("argument above the declared domain of " + fn->name);
        return boost::multiprecision::exp(log_integral(*fn, z[0], 0));
      }
      case FunctionSpec::Mode::ClosedForm: break;
    }
    throw Error("closed-form function symbol left unexpanded: " + fn->name);
  }

  Real base_value(const BaseSpec& b) {
    switch (b.kind) {
      case BaseKind::E: return Real(1);
      case BaseKind::Atom: return gen(b.atom);
      case BaseKind::Prime: return Real(b.prime.get_str());
      case BaseKind::Compound: return eval(b.poly);
    }
    return Real(0);
  }

  Real compute(GenRef g) {
    switch (g->kind) {
      case GenKind::Var:
      case GenKind::Jet:
      case GenKind::Param:
      case GenKind::Element: {
        auto it = a_.values.find(g);
        if (it == a_.values.end()) throw Error("unbound symbol " + to_string(g));
        return it->second;
      }
      case GenKind::Func: {
        auto it = a_.values.find(g);
        if (it != a_.values.end()) return it->second;
        return function(g);
      }
      case GenKind::Pow: {
        BaseSpec b = base_of(g);
        Real p = eval(g->piece);
        if (b.kind == BaseKind::E) return boost::multiprecision::exp(p);
        Real v = boost::multiprecision::abs(base_value(b));
        guard_nonzero(v, "power base");
        return boost::multiprecision::exp(p * boost::multiprecision::log(v));
      }
      case GenKind::Ln: {
        Real v = boost::multiprecision::abs(eval(g->args[0]));
        guard_nonzero(v, "logarithm argument");
        return boost::multiprecision::log(v);
      }
      case GenKind::Sin: return boost::multiprecision::sin(eval(g->args[0]));
      case GenKind::Cos: return boost::multiprecision::cos(eval(g->args[0]));
      case GenKind::Atan: return boost::multiprecision::atan(eval(g->args[0]));
    }
    return Real(0);
  }

  const Real& gen(GenRef g) {
    auto it = memo_.find(g);
    if (it != memo_.end()) return it->second;
    Real v = compute(g);
    if (!boost::multiprecision::isfinite(v)) throw SingularPoint("non-finite value of " + to_string(g));
    return memo_.emplace(g, std::move(v)).first->second;
  }
};

}  // namespace

Real eval(const Expr& e, const Assignment& a) { return Evaluator(a).eval(e); }

Residual eval_residual(const Expr& e, const Assignment& a) { return Evaluator(a).residual(e); }

Real integrate_log_derivative(const FunctionSpec& fn, const Real& z, const Assignment& a, int steps) {
  if (fn.mode != FunctionSpec::Mode::LogDerivative) throw Error(fn.name + " has no log-derivative rule");
  return Evaluator(a).log_integral(fn, z, steps);
}

Sampler::Sampler(const SampleDomain& dom) : dom_(dom), state_(dom.seed) {}

double Sampler::uniform() { return next_unit(state_); }

Assignment Sampler::draw(const std::vector<GenRef>& leaves) {
  Assignment a;
  a.model_seed = dom_.seed;
  a.margin = dom_.margin;
  for (GenRef g : leaves) {
    if (!g->is_leaf()) continue;
    std::string name = to_string(g);
    std::vector<const ParamConstraint*> cons;
    for (const auto& c : dom_.constraints)
      if (c.name == name) cons.push_back(&c);
    const ParamConstraint* pinned = nullptr;
    for (const auto* c : cons)
      if (c->op == ParamConstraint::Op::Equal || c->op == ParamConstraint::Op::InSet) pinned = c;
    if (pinned) {
      std::size_t i = pinned->op == ParamConstraint::Op::Equal
                          ? 0
                          : static_cast<std::size_t>(uniform() * static_cast<double>(pinned->values.size()));
      a.values[g] = to_real(pinned->values.at(std::min(i, pinned->values.size() - 1)));
      continue;
    }
    auto it = dom_.intervals.find(name);
    if (g->kind == GenKind::Param && it == dom_.intervals.end()) {
      // Rationals k/16 in [1/4, 4], redrawn until the constraints hold.
      for (int tries = 0;; ++tries) {
        if (tries > 1000) throw Error("sampling domain empty for " + name);
        Rational v(static_cast<long>(4 + uniform() * 61), 16);
        v.canonicalize();
        bool ok = true;
        for (const auto* c : cons) ok &= c->holds(v);
        if (ok) {
          a.values[g] = to_real(v);
          break;
        }
      }
      continue;
    }
    std::pair<Rational, Rational> iv;
    if (it != dom_.intervals.end())
      iv = it->second;
    else if (g->kind == GenKind::Jet)
      iv = {Rational(-3, 2), Rational(3, 2)};
    else
      iv = {Rational(1, 2), Rational(3, 2)};
    for (int tries = 0;; ++tries) {
      if (tries > 1000) throw Error("sampling domain empty for " + name);
      double r = uniform();
      Real lo = to_real(iv.first), hi = to_real(iv.second);
      Real v = lo + (hi - lo) * Real(r);
      bool ok = true;
      for (const auto* c : cons) {
        Real ref = to_real(c->values.at(0));
        if (c->op == ParamConstraint::Op::Greater) ok &= v > ref;
        if (c->op == ParamConstraint::Op::Less) ok &= v < ref;
        if (c->op == ParamConstraint::Op::NotEqual)
          for (const auto& x : c->values) ok &= boost::multiprecision::abs(v - to_real(x)) > dom_.margin;
      }
      if (ok) {
        a.values[g] = v;
        break;
      }
    }
  }
  return a;
}

std::string format_real(const Real& r, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << r;
  return os.str();
}

}  // namespace liesym
