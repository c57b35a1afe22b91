#include "liesym/suite.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <random>
#include <sstream>

#include "json.hpp"

#include "liesym/conslaw.hpp"
#include "liesym/function.hpp"
#include "liesym/gcs.hpp"

namespace liesym {

bool Entry::failed() const { return expect_nonzero ? grade != Grade::NonZero : grade == Grade::NonZero; }

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t i2 = i, j2 = j;
      while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      std::string x = a.substr(i, i2 - i), y = b.substr(j, j2 - j);
      x.erase(0, std::min(x.find_first_not_of('0'), x.size()));
      y.erase(0, std::min(y.find_first_not_of('0'), y.size()));
      if (x.size() != y.size()) return x.size() < y.size();
      if (x != y) return x < y;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

void Report::sort() {
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.id != y.id) return natural_less(x.id, y.id);
    return x.operation < y.operation;
  });
}

bool Report::failed() const {
  return std::any_of(entries.begin(), entries.end(), [](const Entry& e) { return e.failed(); });
}

int Report::count(Grade g) const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.grade == g; }));
}

namespace {

using Clock = std::chrono::steady_clock;

std::string describe(const ZeroVerdict& v) {
  std::ostringstream os;
  os << v.reason;
  if (v.grade == Grade::NumericZero || v.grade == Grade::NonZero) {
    if (v.max_residual > 0) {
      if (os.tellp() > 0) os << "; ";
      os << "max relative residual " << v.max_residual;
    }
  }
  if (!v.witness.empty()) {
    if (os.tellp() > 0) os << "; ";
    os << "witness";
    for (const auto& [k, x] : v.witness) os << ' ' << k << '=' << x;
  }
  return os.str();
}

template <class F>
Entry run(const std::string& id, const std::string& op, F&& body) {
  Entry e;
  e.id = id;
  e.operation = op;
  auto start = Clock::now();
  try {
    body(e);
  } catch (const std::exception& ex) {
    e.grade = Grade::NonZero;
    e.detail = std::string("error: ") + ex.what();
  }
  e.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return e;
}

void set_verdict(Entry& e, const ZeroVerdict& v) {
  e.grade = v.grade;
  std::string d = describe(v);
  if (!d.empty()) e.detail = e.detail.empty() ? d : e.detail + "; " + d;
}

Bindings param_bindings(const Binding& b) {
  Bindings out;
  for (const auto& [name, v] : b) out.bind_param(name, Expr(v));
  return out;
}

EquationSpec bind_eq(const EquationSpec& eq, const Bindings& b) {
  if (b.empty()) return eq;
  EquationSpec r = eq;
  r.f = substitute(eq.f, b);
  r.H = substitute(eq.H, b);
  r.K = substitute(eq.K, b);
  return r;
}

VectorField bind_field(const VectorField& q, const Bindings& b) {
  if (b.empty()) return q;
  return {substitute(q.tau, b), substitute(q.xi, b), substitute(q.eta, b)};
}

std::string annotation_of(const Annotation& a) { return a.corrected() ? a.to_string() : ""; }

ZeroVerdict all_zero(const std::vector<Expr>& es, const SampleDomain& dom = {}) {
  ZeroVerdict v;
  for (const Expr& e : es) v = combine(v, is_zero(e, ZeroMode::Auto, dom));
  return v;
}

ZeroVerdict equivalence_verdict(const EquivalenceResult& r, Entry& e) {
  e.multiplier = to_string(r.multiplier);
  auto scale = r.f_scale.as_rational();
  if (!scale || *scale != Rational(1))
    e.detail = "f scaled by " + to_string(r.f_scale);
  if (!r.note.empty()) e.detail = e.detail.empty() ? r.note : e.detail + "; " + r.note;
  ZeroVerdict v = r.verdict;
  if (!r.holds && v.zero()) {
    v.grade = Grade::NonZero;
    if (v.reason.empty()) v.reason = "transformation does not map the equations";
  }
  if (r.holds && r.multiplier.is_zero()) {
    v.grade = Grade::NonZero;
    v.reason = "multiplier vanishes";
  }
  return v;
}

Expr std_app(const char* name, Var v) { return func(std_function(name), {var(v)}); }

// Elements f, H, K of an extended expression replaced by the given functions.
Expr bind_elements(const Expr& e, const Expr& f, const Expr& H, const Expr& K) {
  Bindings b;
  b.bind(element_f().as_gen(), f);
  b.bind(element_H().as_gen(), H);
  b.bind(element_K().as_gen(), K);
  return substitute(e, b);
}

bool case_selected(const ClassCase& c, const SuiteOptions& opt) {
  if (opt.table && c.table != *opt.table) return false;
  if (opt.case_id && c.id != *opt.case_id) return false;
  return true;
}

}  // namespace

Report verify_symmetries(const Casebook& cb, const SuiteOptions& opt) {
  Report rep;
  for (const ClassCase& c : cb.cases) {
    if (!case_selected(c, opt)) continue;
    std::vector<std::optional<Binding>> variants{std::nullopt};
    for (const auto& alt : c.alternatives) variants.emplace_back(alt);
    for (const auto& variant : variants) {
      Bindings b = variant ? param_bindings(*variant) : Bindings();
      EquationSpec eq = bind_eq(c.eq, b);
      for (std::size_t i = 0; i < c.generators.size(); ++i) {
        std::string id = c.id + "#" + std::to_string(i + 1);
        if (variant) id += " @ " + to_string(*variant);
        rep.entries.push_back(run(id, "symmetry", [&](Entry& e) {
          VectorField q = bind_field(c.generators[i], b);
          e.multiplier = to_string(q);
          e.annotation = annotation_of(c.annotation);
          set_verdict(e, check_symmetry(eq, q, opt.mode));
        }));
      }
    }
    if (c.annotation.corrected()) {
      rep.entries.push_back(run(c.id, "symmetry-printed", [&](Entry& e) {
        e.expect_nonzero = true;
        e.annotation = annotation_of(c.annotation);
        ClassCase p = cb.printed_case(c.id);
        ZeroVerdict v;
        for (const VectorField& q : p.generators) v = combine(v, check_symmetry(p.eq, q, opt.mode));
        set_verdict(e, v);
      }));
    }
  }
  rep.sort();
  return rep;
}

Report verify_group_action(const GroupActionRecord& rec, int members, std::uint64_t seed) {
  Report rep;
  Expr f = std_app("f", Var::x), H = std_app("H", Var::u), K = std_app("K", Var::u);
  auto map_for = [&](const Expr& fe, const Expr& He, const Expr& Ke, const Bindings& eps) {
    PointTransformation T;
    T.t_new = substitute(rec.vars[0], eps);
    T.x_new = substitute(rec.vars[1], eps);
    T.u_new = substitute(rec.vars[2], eps);
    T.f_new = substitute(bind_elements(rec.elems[0], fe, He, Ke), eps);
    T.H_new = substitute(bind_elements(rec.elems[1], fe, He, Ke), eps);
    T.K_new = substitute(bind_elements(rec.elems[2], fe, He, Ke), eps);
    return T;
  };
  rep.entries.push_back(run(rec.id, "group-action", [&](Entry& e) {
    EquationSpec g = generic_equation();
    e.annotation = annotation_of(rec.annotation);
    set_verdict(e, equivalence_verdict(verify_equivalence(g, g, map_for(f, H, K, Bindings())), e));
  }));
  // Random members of the class: elements from a fixed pool, rational group parameters.
  const ParseContext ctx = ParseContext::standard();
  const std::vector<std::string> fs{"1", "exp(x)", "x^2+1", "f(x)"}, Hs{"exp(u)", "u^2+1", "H(u)"},
      Ks{"0", "u", "exp(2*u)", "K(u)"};
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  auto rational = [&](bool nonzero) {
    for (;;) {
      long p = static_cast<long>(rng() % 7) - 3, q = static_cast<long>(rng() % 3) + 1;
      Rational r(p, q);
      r.canonicalize();
      if (p != 0 || !nonzero) return r;
    }
  };
  for (int m = 0; m < members; ++m) {
    EquationSpec eq;
    eq.f = parse(pick(fs), ctx);
    eq.H = parse(pick(Hs), ctx);
    eq.K = parse(pick(Ks), ctx);
    Bindings eps;
    std::string desc;
    for (int i = 1; i <= 7; ++i) {
      Rational r = rational(i >= 4);
      eps.bind_param("eps" + std::to_string(i), Expr(r));
      desc += (i > 1 ? ", " : "") + std::string("eps") + std::to_string(i) + " = " + r.get_str();
    }
    eq.id = to_string(eq.f) + " | " + to_string(eq.H) + " | " + to_string(eq.K);
    rep.entries.push_back(run(rec.id + "~" + std::to_string(m + 1), "group-action", [&](Entry& e) {
      e.detail = eq.id + " with " + desc;
      set_verdict(e, equivalence_verdict(verify_equivalence(eq, eq, map_for(eq.f, eq.H, eq.K, eps)), e));
    }));
  }
  return rep;
}

Report verify_equivalences(const Casebook& cb, const SuiteOptions& opt) {
  Report rep;
  for (const EquivRecord& r : cb.equivalences) {
    if (opt.case_id && r.source != *opt.case_id && r.target != *opt.case_id) continue;
    std::string ann = annotation_of(r.annotation);
    rep.entries.push_back(run(r.id, "equivalence", [&](Entry& e) {
      e.annotation = ann;
      set_verdict(e, equivalence_verdict(verify_equivalence(r.source_eq, r.target_eq, r.map), e));
    }));
    if (r.annotation.corrected()) {
      rep.entries.push_back(run(r.id, "equivalence-printed", [&](Entry& e) {
        e.expect_nonzero = true;
        e.annotation = ann;
        EquivRecord p = cb.printed_equivalence(r.id);
        set_verdict(e, equivalence_verdict(verify_equivalence(p.source_eq, p.target_eq, p.map), e));
      }));
    }
    const ClassCase* src = cb.find_case(r.source);
    if (!r.push || !src) continue;
    for (std::size_t i = 0; i < src->generators.size(); ++i) {
      rep.entries.push_back(run(r.id + "#" + std::to_string(i + 1), "push-forward", [&](Entry& e) {
        e.annotation = ann;
        VectorField q = push_forward(bind_field(src->generators[i], r.source_params), r.map);
        e.multiplier = to_string(q);
        set_verdict(e, check_symmetry(r.target_eq, q, opt.mode));
      }));
    }
  }
  if (!opt.case_id) {
    for (const AlgebraRecord& a : cb.algebras) {
      for (std::size_t i = 0; i < a.operators.size(); ++i) {
        rep.entries.push_back(run(a.id + "#" + std::to_string(i + 1), "equivalence-algebra", [&](Entry& e) {
          e.multiplier = to_string(a.operators[i]);
          e.annotation = annotation_of(a.annotation);
          set_verdict(e, all_zero(extended_invariance_residual(a.operators[i])));
        }));
      }
      if (a.annotation.corrected()) {
        rep.entries.push_back(run(a.id, "equivalence-algebra-printed", [&](Entry& e) {
          e.expect_nonzero = true;
          e.annotation = annotation_of(a.annotation);
          AlgebraRecord p = cb.printed_algebra(a.id);
          ZeroVerdict v;
          for (const ExtendedField& X : p.operators) v = combine(v, all_zero(extended_invariance_residual(X)));
          set_verdict(e, v);
        }));
      }
    }
    for (const CondEquivRecord& c : cb.conditional) {
      for (std::size_t i = 0; i < c.operators.size(); ++i) {
        rep.entries.push_back(run(c.id + "#" + std::to_string(i + 1), "conditional-equivalence", [&](Entry& e) {
          e.multiplier = to_string(c.operators[i]);
          e.annotation = annotation_of(c.annotation);
          set_verdict(e, all_zero(extended_invariance_residual(c.operators[i], c.cls)));
        }));
      }
    }
    for (const GroupActionRecord& g : cb.actions) {
      Report sub = verify_group_action(g, 5, default_seed());
      rep.entries.insert(rep.entries.end(), sub.entries.begin(), sub.entries.end());
    }
  }
  rep.sort();
  return rep;
}

namespace {

ZeroVerdict reduction_verdict(const AnsatzRecord& r, Entry& e) {
  SampleDomain dom = sample_domain(r.eq);
  dom.constraints.insert(dom.constraints.end(), r.constraints.begin(), r.constraints.end());
  ZeroVerdict inv = is_zero(ansatz_invariance_residual(r.ansatz), ZeroMode::Auto, dom);
  if (!inv.zero()) inv.reason = "ansatz is not invariant under the generator";
  ReductionMatch m = check_reduction(r.eq, r.ansatz, r.ode, r.constraints);
  e.multiplier = to_string(m.ratio);
  ZeroVerdict v = combine(inv, m.verdict);
  if (!m.matches && v.zero()) {
    v.grade = Grade::NonZero;
    v.reason = "reduced equation differs from the recorded one";
  }
  return v;
}

}  // namespace

Report verify_reductions(const Casebook& cb, const SuiteOptions& opt) {
  Report rep;
  for (const AnsatzRecord& r : cb.ansatze) {
    if (opt.case_id && r.case_id != *opt.case_id) continue;
    rep.entries.push_back(run(r.id, "reduction", [&](Entry& e) {
      e.annotation = annotation_of(r.annotation);
      set_verdict(e, reduction_verdict(r, e));
    }));
    if (r.annotation.corrected()) {
      rep.entries.push_back(run(r.id, "reduction-printed", [&](Entry& e) {
        e.expect_nonzero = true;
        e.annotation = annotation_of(r.annotation);
        set_verdict(e, reduction_verdict(cb.printed_ansatz(r.id), e));
      }));
    }
  }
  rep.sort();
  return rep;
}

Report verify_solutions(const Casebook& cb, const SuiteOptions& opt) {
  Report rep;
  for (const SolutionRecord& s : cb.solutions) {
    if (opt.case_id && s.case_id != *opt.case_id) continue;
    std::string op = std::string("solution-") + form_name(s.solution.form);
    rep.entries.push_back(run(s.id, op, [&](Entry& e) {
      e.annotation = annotation_of(s.annotation);
      set_verdict(e, verify_solution(s.eq, s.solution));
    }));
    if (s.annotation.corrected()) {
      rep.entries.push_back(run(s.id, op + "-printed", [&](Entry& e) {
        e.expect_nonzero = true;
        e.annotation = annotation_of(s.annotation);
        SolutionRecord p = cb.printed_solution(s.id);
        set_verdict(e, verify_solution(p.eq, p.solution));
      }));
    }
  }
  rep.sort();
  return rep;
}

Report verify_conservation_laws(const Casebook& cb, const SuiteOptions&) {
  Report rep;
  std::map<std::string, std::vector<const CLRow*>> rows_of;
  for (const CLRow& row : cb.cl_rows) {
    for (const std::string& law_id : row.laws) {
      const CLRecord* law = cb.find_law(law_id);
      rows_of[law_id].push_back(&row);
      rep.entries.push_back(run(row.id + "/" + law_id, "conservation-law", [&](Entry& e) {
        e.annotation = annotation_of(law->annotation);
        ZeroVerdict v = verify_divergence(row.eq, law->cv);
        if (v.zero()) {
          Characteristic ch = characteristic(row.eq, law->cv);
          e.multiplier = to_string(ch.lambda);
          v = combine(v, ch.remainder);
        }
        set_verdict(e, v);
      }));
    }
    for (const std::string& ex : row.excluded) {
      rep.entries.push_back(run(row.id + " @ " + ex, "row-exclusion", [&](Entry& e) {
        ParamConstraint c = parse_constraint(ex);
        if (c.op != ParamConstraint::Op::Equal || c.values.size() != 1) throw Error("exclusion must be 'name = value'");
        std::string violated;
        for (const ParamConstraint& rc : row.eq.constraints)
          if (rc.name == c.name && !rc.holds(c.values[0])) violated = rc.to_string();
        if (violated.empty()) {
          e.grade = Grade::NonZero;
          e.detail = ex + " is admitted by the row constraints";
        } else {
          e.grade = Grade::Skipped;
          e.detail = "constraint violation: " + ex + " contradicts " + violated + "; row not verified";
        }
      }));
    }
  }
  for (const CLRecord& law : cb.laws) {
    if (!law.annotation.corrected()) continue;
    rep.entries.push_back(run(law.id, "conservation-law-printed", [&](Entry& e) {
      e.expect_nonzero = true;
      e.annotation = annotation_of(law.annotation);
      CLRecord p = cb.printed_law(law.id);
      ZeroVerdict v;
      for (const CLRow* row : rows_of[law.id]) v = combine(v, verify_divergence(row->eq, p.cv));
      set_verdict(e, v);
    }));
  }
  rep.sort();
  return rep;
}

namespace {

ZeroVerdict q_verdict(const GcsRecord& r) {
  Expr q1 = diff(*r.q, Var::u), q2 = diff(q1, Var::u);
  SampleDomain dom;
  dom.constraints = r.constraints;
  return is_zero(r.g * q1 - q2, ZeroMode::Auto, dom);
}

EquationSpec gcs_equation(const GcsRecord& r) {
  EquationSpec eq;
  eq.id = r.id;
  eq.f = Expr(1);
  eq.H = r.H;
  eq.K = r.K;
  eq.constraints = r.constraints;
  return eq;
}

}  // namespace

Report verify_gcs(const Casebook& cb, const SuiteOptions&) {
  Report rep;
  for (const GcsRecord& r : cb.gcs) {
    std::string ann = annotation_of(r.annotation);
    rep.entries.push_back(run(r.id, "gcs-system", [&](Entry& e) {
      e.annotation = ann;
      set_verdict(e, gcs_system_verdict(r.H, r.K, r.g, r.constraints));
    }));
    rep.entries.push_back(run(r.id, "gcs-full", [&](Entry& e) {
      e.annotation = ann;
      set_verdict(e, gcs_full_residual(gcs_equation(r), r.g));
    }));
    if (r.q) {
      rep.entries.push_back(run(r.id, "gcs-q", [&](Entry& e) {
        e.annotation = ann;
        e.multiplier = to_string(*r.q);
        set_verdict(e, q_verdict(r));
      }));
    }
    if (r.annotation.corrected()) {
      rep.entries.push_back(run(r.id, "gcs-q-printed", [&](Entry& e) {
        e.expect_nonzero = true;
        e.annotation = ann;
        GcsRecord p = cb.printed_gcs(r.id);
        e.multiplier = to_string(*p.q);
        set_verdict(e, q_verdict(p));
      }));
    }
  }
  // Seeded negative controls: a recorded triple with g shifted by c*u^k.
  if (!cb.gcs.empty()) {
    std::mt19937_64 rng(default_seed());
    for (int i = 0; i < 5; ++i) {
      const GcsRecord& r = cb.gcs[rng() % cb.gcs.size()];
      Expr shift = Expr(static_cast<long>(rng() % 4) + 1) * pow(var(Var::u), static_cast<long>(rng() % 3));
      rep.entries.push_back(run("G.control~" + std::to_string(i + 1), "gcs-control", [&](Entry& e) {
        e.expect_nonzero = true;
        Expr g = r.g + shift;
        ZeroVerdict sys = gcs_system_verdict(r.H, r.K, g, r.constraints);
        ZeroVerdict full = gcs_full_residual(gcs_equation(r), g);
        e.multiplier = to_string(g);
        e.detail = r.id + " with g + " + to_string(shift) + ": system " + grade_name(sys.grade) + ", full " +
                   grade_name(full.grade);
        e.grade = sys.zero() == full.zero() ? sys.grade : Grade::SymbolicZero;
        if (sys.zero() != full.zero()) e.detail += "; criteria disagree";
      }));
    }
  }
  for (const ScaffoldBranch& b : integrate_case_C_scaffold()) {
    rep.entries.push_back(run("C.scaffold/" + b.name, "scaffold", [&](Entry& e) {
      e.expect_nonzero = !b.expect_zero;
      set_verdict(e, b.verdict);
    }));
  }
  rep.sort();
  return rep;
}

std::string to_text(const Report& r) {
  std::ostringstream os;
  for (const Entry& e : r.entries) {
    os << (e.failed() ? "FAIL " : "ok   ") << e.id << "  " << e.operation << "  " << grade_name(e.grade);
    if (e.expect_nonzero)
      os << (e.operation == "gcs-control" ? " (negative control, refutation expected)" : " (printed form, refutation expected)");
    if (!e.multiplier.empty()) os << "  [" << e.multiplier << "]";
    if (!e.detail.empty()) os << "  " << e.detail;
    os << '\n';
  }
  int failed = static_cast<int>(std::count_if(r.entries.begin(), r.entries.end(), [](const Entry& e) { return e.failed(); }));
  os << r.entries.size() << " entries: " << r.count(Grade::SymbolicZero) << " SymbolicZero, "
     << r.count(Grade::NumericZero) << " NumericZero, " << r.count(Grade::NonZero) << " NonZero, "
     << r.count(Grade::Skipped) << " Skipped; " << failed << " failed\n";
  return os.str();
}

std::string to_json(const Report& r, int indent) {
  nlohmann::ordered_json j;
  j["casebook_version"] = r.casebook_version;
  j["seed"] = r.seed;
  j["entries"] = nlohmann::ordered_json::array();
  for (const Entry& e : r.entries) {
    nlohmann::ordered_json x;
    x["id"] = e.id;
    x["operation"] = e.operation;
    x["grade"] = grade_name(e.grade);
    x["expect_nonzero"] = e.expect_nonzero;
    x["failed"] = e.failed();
    x["multiplier"] = e.multiplier;
    x["detail"] = e.detail;
    x["annotation"] = e.annotation;
    x["seconds"] = e.seconds;
    j["entries"].push_back(std::move(x));
  }
  j["failed"] = r.failed();
  return j.dump(indent);
}

}  // namespace liesym
