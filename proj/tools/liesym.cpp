// liesym: command-line front end for the casebook verification suites.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "liesym/suite.hpp"

using namespace liesym;

namespace {

struct Options {
  bool json = false;
  bool numeric_only = false;
  std::uint64_t seed = 0x5EED;
  std::string casebook;
  std::optional<int> table;
  std::string case_id;
  std::string eps;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Casebook load(const Options& o) { return Casebook::load(o.casebook.empty() ? default_casebook_path() : o.casebook); }

const ClassCase& require_case(const Casebook& cb, const std::string& id) {
  const ClassCase* c = cb.find_case(id);
  if (!c) throw UsageError("unknown case '" + id + "'");
  return *c;
}

int emit(const Report& r, const Options& o) {
  if (o.json)
    std::cout << to_json(r) << '\n';
  else
    std::cout << to_text(r);
  return r.failed() ? 1 : 0;
}

Report with_meta(Report r, const Options& o) {
  r.seed = o.seed;
  return r;
}

int verify(const std::string& what, const Options& o) {
  Casebook cb = load(o);
  SuiteOptions s;
  s.mode = o.numeric_only ? ZeroMode::Numeric : ZeroMode::Auto;
  s.table = o.table;
  if (!o.case_id.empty()) {
    require_case(cb, o.case_id);
    s.case_id = o.case_id;
  }
  Report r;
  auto add = [&](const Report& x) { r.entries.insert(r.entries.end(), x.entries.begin(), x.entries.end()); };
  if (what == "symmetries" || what == "all") add(verify_symmetries(cb, s));
  if (what == "equivalences" || what == "all") add(verify_equivalences(cb, s));
  if (what == "reductions" || what == "all") add(verify_reductions(cb, s));
  if (what == "solutions" || what == "all") add(verify_solutions(cb, s));
  if (what == "cl" || what == "all") add(verify_conservation_laws(cb, s));
  if (what == "gcs" || what == "all") add(verify_gcs(cb, s));
  r.sort();
  return emit(with_meta(r, o), o);
}

int derive_detsys(const Options& o) {
  EquationSpec eq = generic_equation();
  if (!o.case_id.empty()) eq = require_case(load(o), o.case_id).eq;
  DeterminingSystem sys = derive_determining_system(eq);
  if (o.json) {
    nlohmann::ordered_json j;
    j["equation"] = {{"f", to_string(eq.f)}, {"H", to_string(eq.H)}, {"K", to_string(eq.K)}};
    j["equations"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < sys.equations.size(); ++i)
      j["equations"].push_back({{"monomial", sys.monomials[i]}, {"equation", to_string(sys.equations[i])}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "f = " << eq.f << ", H = " << eq.H << ", K = " << eq.K << '\n';
    for (std::size_t i = 0; i < sys.equations.size(); ++i)
      std::cout << "[" << sys.monomials[i] << "] " << sys.equations[i] << " = 0\n";
  }
  return 0;
}

int reduce_case(const Options& o) {
  Casebook cb = load(o);
  require_case(cb, o.case_id);
  SuiteOptions s;
  s.case_id = o.case_id;
  Report r = verify_reductions(cb, s);
  if (!o.json) {
    for (const AnsatzRecord& a : cb.ansatze) {
      if (a.case_id != o.case_id) continue;
      std::cout << a.id << ": u = " << a.ansatz.u << ", omega = " << a.ansatz.omega_of << '\n';
      try {
        std::cout << "  reduced: " << reduce(a.eq, a.ansatz) << " = 0\n";
      } catch (const std::exception& e) {
        std::cout << "  reduced: " << e.what() << '\n';
      }
    }
  }
  return emit(with_meta(r, o), o);
}

int transform_case(const Options& o) {
  Casebook cb = load(o);
  const ClassCase& c = require_case(cb, o.case_id);
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : o.eps) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 7) throw UsageError("--eps needs seven comma-separated values eps1..eps7");
  std::array<Expr, 7> eps;
  for (std::size_t i = 0; i < 7; ++i) eps[i] = parse(parts[i], cb.context());
  GroupAction g = apply_equivalence_group(c.eq, eps);
  Report r;
  Entry e;
  e.id = c.id;
  e.operation = "group-action";
  EquivalenceResult res = verify_equivalence(c.eq, g.image, g.map);
  e.grade = res.holds ? res.verdict.grade : Grade::NonZero;
  e.multiplier = to_string(res.multiplier);
  e.detail = "image: f = " + to_string(g.image.f) + ", H = " + to_string(g.image.H) + ", K = " + to_string(g.image.K);
  r.entries.push_back(e);
  return emit(with_meta(r, o), o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic verification of the casebook for f(x)u_tt = (H(u)u_x)_x + K(u)u_x"};
  app.require_subcommand(1);
  Options o;
  if (const char* env = std::getenv("LIESYM_CASEBOOK")) o.casebook = env;
  app.add_flag("--json", o.json, "Machine-readable report");
  app.add_flag("--numeric-only", o.numeric_only, "Skip exact normalization; decide every zero test by sampling");
  app.add_option("--seed", o.seed, "Sampling seed");
  app.add_option("--casebook", o.casebook, "Casebook path (default: LIESYM_CASEBOOK, then the bundled file)");

  std::string what;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", what, "symmetries | equivalences | reductions | solutions | cl | gcs | all")
      ->required()
      ->check(CLI::IsMember({"symmetries", "equivalences", "reductions", "solutions", "cl", "gcs", "all"}));
  verify_cmd->add_option("--table", o.table, "Restrict symmetries to one table")->check(CLI::Range(1, 4));
  verify_cmd->add_option("--case", o.case_id, "Restrict to one case id");

  auto* derive_cmd = app.add_subcommand("derive", "Derive a determining system");
  std::string derive_what;
  derive_cmd->add_option("object", derive_what, "detsys")->required()->check(CLI::IsMember({"detsys"}));
  derive_cmd->add_option("--case", o.case_id, "Case id (default: the generic class)");

  auto* reduce_cmd = app.add_subcommand("reduce", "Reductions recorded for a case");
  reduce_cmd->add_option("--case", o.case_id, "Case id")->required();

  auto* transform_cmd = app.add_subcommand("transform", "Apply the equivalence group to a case");
  transform_cmd->add_option("--case", o.case_id, "Case id")->required();
  transform_cmd->add_option("--eps", o.eps, "eps1,...,eps7")->required();

  for (auto* sub : {verify_cmd, derive_cmd, reduce_cmd, transform_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  set_default_seed(o.seed);
  set_numeric_only(o.numeric_only);
  try {
    if (verify_cmd->parsed()) return verify(what, o);
    if (derive_cmd->parsed()) return derive_detsys(o);
    if (reduce_cmd->parsed()) return reduce_case(o);
    if (transform_cmd->parsed()) return transform_case(o);
  } catch (const UsageError& e) {
    std::cerr << "liesym: " << e.what() << '\n';
    return 2;
  } catch (const CasebookError& e) {
    std::cerr << "liesym: casebook: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "liesym: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
