#include "liesym/casebook.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "liesym/function.hpp"

#ifndef LIESYM_CASEBOOK_DEFAULT
#define LIESYM_CASEBOOK_DEFAULT "data/casebook.txt"
#endif

namespace liesym {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

// "name = value" at the first top-level '='.
std::pair<std::string, std::string> split_assignment(const std::string& s) {
  std::size_t p = s.find('=');
  if (p == std::string::npos || p == 0) throw CasebookError("expected 'name = value' in '" + s + "'");
  return {trim(s.substr(0, p)), trim(s.substr(p + 1))};
}

[[noreturn]] void fail(const Block& b, const std::string& msg) {
  throw CasebookError("[" + b.kind + " " + b.id + "] (line " + std::to_string(b.line) + "): " + msg);
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"params", {"names"}},
      {"function", {"var", "logderiv", "closed", "anchor"}},
      {"case", {"table", "row", "f", "H", "K", "constraint", "alt", "gen", "footnote"}},
      {"equiv",
       {"source", "source_eq", "source_bind", "target", "target_eq", "target_bind", "t", "x", "u", "inv_t", "inv_x",
        "inv_u", "chart", "push"}},
      {"condequiv", {"H", "K", "k_equals_h", "op"}},
      {"algebra", {"op"}},
      {"action", {"t", "x", "u", "f", "H", "K"}},
      {"ansatz", {"case", "bind", "gen", "u", "omega", "ode", "constraint"}},
      {"solution",
       {"case", "bind", "f", "H", "K", "form", "u", "relation", "integrand", "rhs", "q", "g", "sep_u", "phi_ode",
        "psi_ode", "phi", "psi", "chart", "constants", "constraint"}},
      {"cl", {"T", "X"}},
      {"clrow", {"f", "H", "K", "laws", "exclude", "constraint"}},
      {"gcs", {"H", "K", "g", "q", "constraint"}},
  };
  return keys;
}

const std::set<std::string>& annotation_keys() {
  static const std::set<std::string> keys = {"status", "original", "evidence", "note"};
  return keys;
}

Rational parse_rational(const std::string& s) {
  Expr e = parse(s);
  auto q = e.as_rational();
  if (!q) throw CasebookError("expected a rational constant, got '" + s + "'");
  return *q;
}

Binding parse_binding(const std::string& s) {
  Binding b;
  for (const std::string& part : split(s, ',')) {
    auto [name, value] = split_assignment(part);
    b[name] = parse_rational(value);
  }
  return b;
}

Bindings param_bindings(const Binding& b) {
  Bindings out;
  for (const auto& [name, v] : b) out.bind(param_gen(name), Expr(v));
  return out;
}

EquationSpec bind_equation(const EquationSpec& eq, const Bindings& b) {
  EquationSpec r = eq;
  r.f = substitute(eq.f, b);
  r.H = substitute(eq.H, b);
  r.K = substitute(eq.K, b);
  return r;
}

Annotation parse_annotation(const Block& b) {
  Annotation a;
  auto st = b.get("status");
  if (st && *st == "corrected")
    a.status = Annotation::Status::Corrected;
  else if (st && *st != "verified")
    fail(b, "status must be 'verified' or 'corrected'");
  for (const auto& o : b.all("original")) a.original.push_back(split_assignment(o));
  if (auto e = b.get("evidence")) a.evidence = *e;
  a.notes = b.all("note");
  if (a.corrected() && (a.original.empty() || a.evidence.empty()))
    fail(b, "a corrected record needs 'original' and 'evidence'");
  if (!a.corrected() && !a.original.empty()) fail(b, "'original' requires status: corrected");
  return a;
}

void check_constraints(const Block& b, const std::vector<ParamConstraint>& cs) {
  std::map<std::string, std::vector<const ParamConstraint*>> by_name;
  for (const auto& c : cs) by_name[c.name].push_back(&c);
  for (const auto& [name, list] : by_name) {
    std::vector<Rational> candidates;
    for (const auto* c : list)
      if (c->op == ParamConstraint::Op::Equal || c->op == ParamConstraint::Op::InSet)
        candidates.insert(candidates.end(), c->values.begin(), c->values.end());
    if (candidates.empty()) continue;
    bool any = false;
    for (const Rational& v : candidates) {
      bool ok = true;
      for (const auto* c : list) ok &= c->holds(v);
      any |= ok;
    }
    if (!any) fail(b, "contradictory constraints on " + name);
  }
}

std::vector<ParamConstraint> constraints_of(const Block& b) {
  std::vector<ParamConstraint> out;
  for (const auto& c : b.all("constraint")) {
    try {
      out.push_back(parse_constraint(c));
    } catch (const Error& e) {
      fail(b, e.what());
    }
  }
  check_constraints(b, out);
  return out;
}

void drop_bound(std::vector<ParamConstraint>& cs, const Binding& b, const Block& blk) {
  std::vector<ParamConstraint> kept;
  for (const auto& c : cs) {
    auto it = b.find(c.name);
    if (it == b.end()) {
      kept.push_back(c);
    } else if (!c.holds(it->second)) {
      fail(blk, "binding " + c.name + " = " + it->second.get_str() + " violates " + c.to_string());
    }
  }
  cs = kept;
}

}  // namespace

std::optional<std::string> Block::get(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return v;
  return std::nullopt;
}

std::string Block::require(const std::string& key) const {
  auto v = get(key);
  if (!v) fail(*this, "missing key '" + key + "'");
  return *v;
}

std::vector<std::string> Block::all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : fields)
    if (k == key) out.push_back(v);
  return out;
}

Block Block::as_printed() const {
  Block r = *this;
  for (const auto& o : all("original")) {
    auto [key, value] = split_assignment(o);
    int index = 0;
    std::string name = key;
    if (auto lb = key.find('['); lb != std::string::npos) {
      name = key.substr(0, lb);
      index = std::stoi(key.substr(lb + 1));
    }
    int seen = 0;
    bool done = false;
    for (auto& [k, v] : r.fields) {
      if (k != name) continue;
      if (seen++ == index) {
        v = value;
        done = true;
        break;
      }
    }
    if (!done) fail(*this, "original refers to missing key '" + key + "'");
  }
  std::vector<std::pair<std::string, std::string>> kept;
  for (const auto& f : r.fields)
    if (!annotation_keys().count(f.first)) kept.push_back(f);
  r.fields = kept;
  return r;
}

std::string Annotation::to_string() const {
  if (!corrected()) return "verified";
  std::string s = "corrected(original: ";
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (i) s += "; ";
    s += original[i].first + " = " + original[i].second;
  }
  return s + "; evidence: " + evidence + ")";
}

std::string to_string(const Binding& b) {
  std::string s;
  for (const auto& [k, v] : b) {
    if (!s.empty()) s += ", ";
    s += k + " = " + v.get_str();
  }
  return s;
}

namespace {

struct Linear {
  std::vector<Expr> coefs;
};

Linear split_linear(const std::string& text, const ParseContext& base, const std::vector<std::string>& markers) {
  ParseContext ctx = base;
  for (const auto& m : markers) ctx.declare_param(m);
  Expr e = parse(text, ctx);
  Linear out;
  Expr rest = e;
  std::vector<GenRef> gens;
  for (const auto& m : markers) gens.push_back(param_gen(m));
  for (GenRef g : gens) {
    Expr c = diff(e, g);
    for (GenRef h : gens)
      if (depends_on(c, h)) throw ParseError("operator is not linear in " + h->name + ": '" + text + "'", 0);
    out.coefs.push_back(c);
    rest -= c * Expr::from_gen(g);
  }
  if (!rest.is_zero()) throw ParseError("operator has a term without a derivation: '" + text + "'", 0);
  return out;
}

}  // namespace

VectorField parse_vector_field(const std::string& text, const ParseContext& ctx) {
  Linear l = split_linear(text, ctx, {"d_t", "d_x", "d_u"});
  return {l.coefs[0], l.coefs[1], l.coefs[2]};
}

ExtendedField parse_extended_field(const std::string& text, const ParseContext& ctx) {
  ParseContext c = ctx;
  for (const char* e : {"f", "H", "K"}) {
    c.functions.erase(e);
    c.declare_element(e);
  }
  Linear l = split_linear(text, c, {"d_t", "d_x", "d_u", "d_f", "d_H", "d_K"});
  return {l.coefs[0], l.coefs[1], l.coefs[2], l.coefs[3], l.coefs[4], l.coefs[5]};
}

// ---------------------------------------------------------------------------
// Loading

Casebook Casebook::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CasebookError("cannot open casebook '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

Casebook Casebook::from_text(const std::string& text, const std::string& source) {
  Casebook cb;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  bool header = false;
  std::vector<std::string> comments;
  Block* cur = nullptr;
  auto where = [&] { return source + ":" + std::to_string(n) + ": "; };
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (!header) {
      if (t.empty()) continue;
      if (t != "casebook-v1") throw CasebookError(where() + "expected header 'casebook-v1'");
      cb.header_ = t;
      header = true;
      continue;
    }
    if (t.empty()) {
      cur = nullptr;
      continue;
    }
    if (t[0] == '#') {
      if (cur) throw CasebookError(where() + "comment inside a block");
      comments.push_back(line);
      continue;
    }
    if (t[0] == '[') {
      if (t.back() != ']') throw CasebookError(where() + "malformed block header");
      std::string inner = trim(t.substr(1, t.size() - 2));
      auto sp = inner.find(' ');
      Block b;
      b.kind = inner.substr(0, sp);
      b.id = sp == std::string::npos ? "" : trim(inner.substr(sp + 1));
      b.line = n;
      b.comments = comments;
      comments.clear();
      if (!allowed_keys().count(b.kind)) throw CasebookError(where() + "unknown record kind '" + b.kind + "'");
      if (b.id.empty()) throw CasebookError(where() + "record without id");
      if (cb.find_block(b.kind, b.id)) throw CasebookError(where() + "duplicate record '" + b.id + "'");
      cb.blocks_.push_back(std::move(b));
      cur = &cb.blocks_.back();
      continue;
    }
    if (!cur) throw CasebookError(where() + "field outside a block");
    auto colon = line.find(':');
    if (colon == std::string::npos) throw CasebookError(where() + "expected 'key: value'");
    std::string key = trim(line.substr(0, colon)), value = trim(line.substr(colon + 1));
    if (!allowed_keys().at(cur->kind).count(key) && !annotation_keys().count(key))
      throw CasebookError(where() + "unknown key '" + key + "' for " + cur->kind);
    cur->fields.emplace_back(key, value);
  }
  if (!header) throw CasebookError(source + ": empty casebook");
  if (!comments.empty()) throw CasebookError(source + ": trailing comment lines");
  try {
    cb.build();
  } catch (const CasebookError&) {
    throw;
  } catch (const Error& e) {
    throw CasebookError(source + ": " + e.what());
  }
  return cb;
}

std::string Casebook::serialize() const {
  std::string out = header_ + "\n";
  for (const Block& b : blocks_) {
    out += "\n";
    for (const auto& c : b.comments) out += c + "\n";
    out += "[" + b.kind + " " + b.id + "]\n";
    for (const auto& [k, v] : b.fields) out += k + ": " + v + "\n";
  }
  return out;
}

const Block* Casebook::find_block(const std::string& kind, const std::string& id) const {
  for (const Block& b : blocks_)
    if (b.kind == kind && b.id == id) return &b;
  return nullptr;
}

const ClassCase* Casebook::find_case(const std::string& id) const {
  for (const auto& c : cases)
    if (c.id == id) return &c;
  return nullptr;
}

const CLRecord* Casebook::find_law(const std::string& id) const {
  for (const auto& l : laws)
    if (l.id == id) return &l;
  return nullptr;
}

void Casebook::build() {
  ctx_ = ParseContext::standard();
  for (const Block& b : blocks_) {
    if (b.kind == "params") {
      for (const auto& n : split(b.require("names"), ',')) ctx_.declare_param(n);
    } else if (b.kind == "function") {
      std::string v = b.require("var");
      Var var = v == "x" ? Var::x : v == "u" ? Var::u : v == "t" ? Var::t : throw CasebookError("bad var " + v);
      try {
        if (auto r = b.get("logderiv")) {
          Rational anchor = b.get("anchor") ? parse_rational(*b.get("anchor")) : Rational(0);
          ctx_.declare_function(make_log_derivative(b.id, var, parse(*r, ctx_), anchor));
        } else if (auto c = b.get("closed")) {
          ctx_.declare_function(make_closed_form(b.id, var, parse(*c, ctx_)));
        } else {
          ctx_.declare_function(make_opaque(b.id));
        }
      } catch (const CasebookError&) {
        throw;
      } catch (const Error& e) {
        fail(b, e.what());
      }
    }
  }
  auto guarded = [](const Block& b, auto make) {
    try {
      return make(b);
    } catch (const CasebookError&) {
      throw;
    } catch (const Error& e) {
      fail(b, e.what());
    }
  };
  for (const Block& b : blocks_)
    if (b.kind == "case") cases.push_back(guarded(b, [&](const Block& x) { return make_case(x); }));
  for (const Block& b : blocks_) {
    if (b.kind == "equiv") equivalences.push_back(guarded(b, [&](const Block& x) { return make_equivalence(x); }));
    if (b.kind == "condequiv") conditional.push_back(guarded(b, [&](const Block& x) { return make_conditional(x); }));
    if (b.kind == "algebra") algebras.push_back(guarded(b, [&](const Block& x) { return make_algebra(x); }));
    if (b.kind == "action") actions.push_back(guarded(b, [&](const Block& x) { return make_action(x); }));
    if (b.kind == "ansatz") ansatze.push_back(guarded(b, [&](const Block& x) { return make_ansatz(x); }));
    if (b.kind == "solution") solutions.push_back(guarded(b, [&](const Block& x) { return make_solution(x); }));
    if (b.kind == "cl") laws.push_back(guarded(b, [&](const Block& x) { return make_law(x); }));
    if (b.kind == "gcs") gcs.push_back(guarded(b, [&](const Block& x) { return make_gcs(x); }));
  }
  for (const Block& b : blocks_)
    if (b.kind == "clrow") cl_rows.push_back(guarded(b, [&](const Block& x) { return make_cl_row(x); }));
  for (const ClassCase& c : cases)
    for (const auto& fn : c.footnotes)
      if (!find_block("equiv", fn)) fail(*find_block("case", c.id), "dangling reference to equivalence '" + fn + "'");
  // Every printed variant must itself be well formed.
  for (const Block& b : blocks_) {
    if (b.get("status").value_or("") != "corrected") continue;
    Block p = b.as_printed();
    if (b.kind == "case") guarded(p, [&](const Block& x) { return make_case(x); });
    if (b.kind == "equiv") guarded(p, [&](const Block& x) { return make_equivalence(x); });
    if (b.kind == "algebra") guarded(p, [&](const Block& x) { return make_algebra(x); });
    if (b.kind == "ansatz") guarded(p, [&](const Block& x) { return make_ansatz(x); });
    if (b.kind == "solution") guarded(p, [&](const Block& x) { return make_solution(x); });
    if (b.kind == "cl") guarded(p, [&](const Block& x) { return make_law(x); });
    if (b.kind == "gcs") guarded(p, [&](const Block& x) { return make_gcs(x); });
  }
}

EquationSpec Casebook::equation_of(const Block& b, const std::string& id) const {
  EquationSpec eq;
  if (auto c = b.get("case")) {
    const ClassCase* cc = find_case(*c);
    if (!cc) fail(b, "dangling reference to case '" + *c + "'");
    eq = cc->eq;
    if (auto bind = b.get("bind")) {
      Binding bb = parse_binding(*bind);
      drop_bound(eq.constraints, bb, b);
      eq = bind_equation(eq, param_bindings(bb));
    }
  } else {
    eq.f = parse(b.require("f"), ctx_);
    eq.H = parse(b.require("H"), ctx_);
    eq.K = parse(b.require("K"), ctx_);
  }
  for (const auto& c : constraints_of(b)) eq.constraints.push_back(c);
  check_constraints(b, eq.constraints);
  eq.id = id;
  return eq;
}

ClassCase Casebook::make_case(const Block& b) const {
  ClassCase c;
  c.id = b.id;
  c.table = std::stoi(b.require("table"));
  c.row = b.require("row");
  c.eq.id = b.id;
  c.eq.f = parse(b.require("f"), ctx_);
  c.eq.H = parse(b.require("H"), ctx_);
  c.eq.K = parse(b.require("K"), ctx_);
  c.eq.constraints = constraints_of(b);
  c.eq.validate();
  for (const auto& g : b.all("gen")) c.generators.push_back(parse_vector_field(g, ctx_));
  if (c.generators.empty()) fail(b, "case without generators");
  for (const auto& a : b.all("alt")) {
    Binding bb = parse_binding(a);
    std::vector<ParamConstraint> cs = c.eq.constraints;
    drop_bound(cs, bb, b);
    c.alternatives.push_back(bb);
  }
  c.footnotes = b.all("footnote");
  c.annotation = parse_annotation(b);
  return c;
}

namespace {

// "f | H | K" with optional per-element overrides "K = expr" and parameter
// substitutions "name = expr".
Bindings apply_binds(EquationSpec& eq, const std::vector<std::string>& binds, const ParseContext& ctx, const Block& b) {
  Bindings params;
  for (const auto& line : binds) {
    for (const auto& part : split(line, ',')) {
      auto [name, value] = split_assignment(part);
      Expr v = parse(value, ctx);
      if (name == "f")
        eq.f = v;
      else if (name == "H")
        eq.H = v;
      else if (name == "K")
        eq.K = v;
      else if (ctx.params.count(name))
        params.bind(param_gen(name), v);
      else
        fail(b, "cannot bind unknown symbol '" + name + "'");
      if (auto q = v.as_rational()) {
        Binding single{{name, *q}};
        drop_bound(eq.constraints, single, b);
      }
    }
  }
  if (!params.empty()) eq = bind_equation(eq, params);
  return params;
}

}  // namespace

EquivRecord Casebook::make_equivalence(const Block& b) const {
  EquivRecord r;
  r.id = b.id;
  auto side = [&](const char* key, const char* eq_key, const char* bind_key, std::string& name, Bindings& params) {
    EquationSpec eq;
    if (auto c = b.get(key)) {
      const ClassCase* cc = find_case(*c);
      if (!cc) fail(b, std::string("dangling reference to case '") + *c + "'");
      eq = cc->eq;
      name = *c;
    } else if (auto inline_eq = b.get(eq_key)) {
      auto parts = split(*inline_eq, '|');
      if (parts.size() != 3) fail(b, std::string(eq_key) + " must be 'f | H | K'");
      eq.f = parse(parts[0], ctx_);
      eq.H = parse(parts[1], ctx_);
      eq.K = parse(parts[2], ctx_);
      name = *inline_eq;
    } else {
      fail(b, std::string("missing '") + key + "' or '" + eq_key + "'");
    }
    params = apply_binds(eq, b.all(bind_key), ctx_, b);
    eq.id = name;
    return eq;
  };
  r.source_eq = side("source", "source_eq", "source_bind", r.source, r.source_params);
  r.target_eq = side("target", "target_eq", "target_bind", r.target, r.target_params);
  r.map.t_new = parse(b.require("t"), ctx_);
  r.map.x_new = parse(b.require("x"), ctx_);
  r.map.u_new = parse(b.require("u"), ctx_);
  auto it = b.get("inv_t"), ix = b.get("inv_x"), iu = b.get("inv_u");
  if (it || ix || iu) {
    if (!(it && ix && iu)) fail(b, "inverse needs inv_t, inv_x and inv_u");
    r.map.inverse = std::array<Expr, 3>{parse(*it, ctx_), parse(*ix, ctx_), parse(*iu, ctx_)};
  }
  r.map.chart = b.get("chart").value_or("");
  r.push = b.get("push").value_or("yes") == "yes";
  if (r.push && !r.map.inverse) fail(b, "pushing generators forward needs an explicit inverse");
  r.annotation = parse_annotation(b);
  return r;
}

CondEquivRecord Casebook::make_conditional(const Block& b) const {
  CondEquivRecord r;
  r.id = b.id;
  r.cls.label = b.id;
  if (auto h = b.get("H")) r.cls.H = parse(*h, ctx_);
  if (auto k = b.get("K")) r.cls.K = parse(*k, ctx_);
  r.cls.K_equals_H = b.get("k_equals_h").value_or("no") == "yes";
  for (const auto& op : b.all("op")) r.operators.push_back(parse_extended_field(op, ctx_));
  r.annotation = parse_annotation(b);
  return r;
}

AlgebraRecord Casebook::make_algebra(const Block& b) const {
  AlgebraRecord r;
  r.id = b.id;
  for (const auto& op : b.all("op")) {
    r.operators.push_back(parse_extended_field(op, ctx_));
    r.op_text.push_back(op);
  }
  r.annotation = parse_annotation(b);
  return r;
}

GroupActionRecord Casebook::make_action(const Block& b) const {
  GroupActionRecord r;
  r.id = b.id;
  ParseContext c = ctx_;
  for (const char* e : {"f", "H", "K"}) {
    c.functions.erase(e);
    c.declare_element(e);
  }
  r.vars = {parse(b.require("t"), c), parse(b.require("x"), c), parse(b.require("u"), c)};
  r.elems = {parse(b.require("f"), c), parse(b.require("H"), c), parse(b.require("K"), c)};
  r.annotation = parse_annotation(b);
  return r;
}

AnsatzRecord Casebook::make_ansatz(const Block& b) const {
  AnsatzRecord r;
  r.id = b.id;
  r.case_id = b.require("case");
  r.eq = equation_of(b, b.id);
  r.ansatz.generator = parse_vector_field(b.require("gen"), ctx_);
  r.ansatz.u = parse(b.require("u"), ctx_);
  r.ansatz.omega_of = parse(b.require("omega"), ctx_);
  r.ode = parse(b.require("ode"), ctx_);
  r.constraints = r.eq.constraints;
  r.annotation = parse_annotation(b);
  return r;
}

SolutionRecord Casebook::make_solution(const Block& b) const {
  SolutionRecord r;
  r.id = b.id;
  r.case_id = b.get("case").value_or("");
  r.eq = equation_of(b, b.id);
  std::string form = b.require("form");
  Solution& s = r.solution;
  std::vector<Expr> parts;
  if (form == "closed") {
    s.form = Solution::Form::Closed;
    s.u = parse(b.require("u"), ctx_);
    parts = {s.u};
  } else if (form == "implicit") {
    s.form = Solution::Form::Implicit;
    s.relation = parse(b.require("relation"), ctx_);
    parts = {s.relation};
  } else if (form == "quadrature") {
    s.form = Solution::Form::Quadrature;
    s.integrand = parse(b.require("integrand"), ctx_);
    s.rhs = parse(b.require("rhs"), ctx_);
    parts = {s.integrand, s.rhs};
  } else if (form == "separated") {
    s.form = Solution::Form::Separated;
    SeparationSpec& sp = s.separation;
    sp.q = parse(b.require("q"), ctx_);
    sp.g = parse(b.require("g"), ctx_);
    sp.u = parse(b.require("sep_u"), ctx_);
    sp.phi_ode = parse(b.require("phi_ode"), ctx_);
    sp.psi_ode = parse(b.require("psi_ode"), ctx_);
    if (auto p = b.get("phi")) sp.phi_explicit = parse(*p, ctx_);
    if (auto p = b.get("psi")) sp.psi_explicit = parse(*p, ctx_);
    for (const auto& c : b.all("chart")) {
      auto [name, range] = split_assignment(c);
      auto dots = range.find("..");
      if (dots == std::string::npos) fail(b, "chart range must be 'lo .. hi'");
      sp.chart[name] = {parse_rational(range.substr(0, dots)), parse_rational(range.substr(dots + 2))};
    }
    parts = {sp.q, sp.g, sp.u, sp.phi_ode, sp.psi_ode};
    if (sp.phi_explicit) parts.push_back(*sp.phi_explicit);
    if (sp.psi_explicit) parts.push_back(*sp.psi_explicit);
  } else {
    fail(b, "unknown solution form '" + form + "'");
  }
  if (auto c = b.get("constants"))
    for (const auto& n : split(*c, ',')) r.constants.push_back(n);
  s.constraints = r.eq.constraints;
  // Every parameter must be a declared constant or a parameter of the equation.
  std::set<std::string> known(r.constants.begin(), r.constants.end());
  for (const Expr* e : {&r.eq.f, &r.eq.H, &r.eq.K})
    for (GenRef g : leaves(*e))
      if (g->kind == GenKind::Param) known.insert(g->name);
  for (const auto& c : r.eq.constraints) known.insert(c.name);
  for (const Expr& e : parts)
    for (GenRef g : leaves(e))
      if (g->kind == GenKind::Param && !known.count(g->name)) fail(b, "undeclared constant '" + g->name + "'");
  r.annotation = parse_annotation(b);
  return r;
}

CLRecord Casebook::make_law(const Block& b) const {
  CLRecord r;
  r.id = b.id;
  r.cv.T = parse(b.require("T"), ctx_);
  r.cv.X = parse(b.require("X"), ctx_);
  if (max_jet_order(r.cv.T) > 1 || max_jet_order(r.cv.X) > 1) fail(b, "conserved vector of jet order above 1");
  r.annotation = parse_annotation(b);
  return r;
}

CLRow Casebook::make_cl_row(const Block& b) const {
  CLRow r;
  r.id = b.id;
  r.eq = equation_of(b, b.id);
  for (const auto& l : split(b.require("laws"), ',')) {
    if (!find_law(l)) fail(b, "dangling reference to conservation law '" + l + "'");
    r.laws.push_back(l);
  }
  r.excluded = b.all("exclude");
  for (const auto& e : r.excluded) parse_binding(e);
  r.annotation = parse_annotation(b);
  return r;
}

GcsRecord Casebook::make_gcs(const Block& b) const {
  GcsRecord r;
  r.id = b.id;
  r.H = parse(b.require("H"), ctx_);
  r.K = parse(b.require("K"), ctx_);
  r.g = parse(b.require("g"), ctx_);
  if (auto q = b.get("q")) r.q = parse(*q, ctx_);
  r.constraints = constraints_of(b);
  r.annotation = parse_annotation(b);
  return r;
}

CasebookCounts Casebook::counts() const {
  CasebookCounts c;
  c.cases = static_cast<int>(cases.size());
  for (const auto& cc : cases) c.generators += static_cast<int>(cc.generators.size());
  c.equivalences = static_cast<int>(equivalences.size());
  c.conditional = static_cast<int>(conditional.size());
  c.ansatze = static_cast<int>(ansatze.size());
  c.solutions = static_cast<int>(solutions.size());
  c.laws = static_cast<int>(laws.size());
  c.cl_rows = static_cast<int>(cl_rows.size());
  c.gcs = static_cast<int>(gcs.size());
  return c;
}

std::vector<Casebook::Match> Casebook::lookup(const Expr& f, const Expr& H, const Expr& K) const {
  std::vector<Match> out;
  for (const ClassCase& c : cases) {
    if (c.eq.f == f && c.eq.H == H && c.eq.K == K) {
      out.push_back({&c, std::nullopt});
      continue;
    }
    for (const Binding& alt : c.alternatives) {
      EquationSpec e = bind_equation(c.eq, param_bindings(alt));
      if (e.f == f && e.H == H && e.K == K) {
        out.push_back({&c, alt});
        break;
      }
    }
  }
  return out;
}

namespace {

const Block& corrected_block(const Casebook& cb, const std::string& kind, const std::string& id) {
  const Block* b = cb.find_block(kind, id);
  if (!b) throw CasebookError("no " + kind + " record '" + id + "'");
  if (b->get("status").value_or("") != "corrected") throw CasebookError(kind + " '" + id + "' carries no correction");
  return *b;
}

}  // namespace

ClassCase Casebook::printed_case(const std::string& id) const {
  return make_case(corrected_block(*this, "case", id).as_printed());
}
EquivRecord Casebook::printed_equivalence(const std::string& id) const {
  return make_equivalence(corrected_block(*this, "equiv", id).as_printed());
}
AlgebraRecord Casebook::printed_algebra(const std::string& id) const {
  return make_algebra(corrected_block(*this, "algebra", id).as_printed());
}
AnsatzRecord Casebook::printed_ansatz(const std::string& id) const {
  return make_ansatz(corrected_block(*this, "ansatz", id).as_printed());
}
SolutionRecord Casebook::printed_solution(const std::string& id) const {
  return make_solution(corrected_block(*this, "solution", id).as_printed());
}
CLRecord Casebook::printed_law(const std::string& id) const {
  return make_law(corrected_block(*this, "cl", id).as_printed());
}
GcsRecord Casebook::printed_gcs(const std::string& id) const {
  return make_gcs(corrected_block(*this, "gcs", id).as_printed());
}

std::string default_casebook_path() {
  if (const char* env = std::getenv("LIESYM_CASEBOOK"); env && *env) return env;
  return LIESYM_CASEBOOK_DEFAULT;
}

}  // namespace liesym
