// Casebook: the classification tables, equivalences, reductions, solutions,
// conservation laws and separable cases as declarative records.
//
// Format "casebook-v1": a header line, then blocks separated by one blank
// line. A block is optional "#" comment lines, a "[kind id]" line and
// "key: value" lines. Values are single-line expressions in the kernel
// grammar unless the key says otherwise. Repeated keys (gen, op, constraint,
// alt, original, ...) keep their order.
//
// Annotations on any record:
//   status: verified | corrected
//   original: key = value      value as printed; key[i] picks a repeated key
//   evidence: text
//   note: text
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liesym/detsys.hpp"
#include "liesym/parse.hpp"
#include "liesym/reduction.hpp"
#include "liesym/transform.hpp"

namespace liesym {

class CasebookError : public Error {
 public:
  using Error::Error;
};

struct Block {
  std::string kind, id;
  std::vector<std::string> comments;
  std::vector<std::pair<std::string, std::string>> fields;
  int line = 0;

  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  std::vector<std::string> all(const std::string& key) const;
  // Copy with each "original: key = value" applied.
  Block as_printed() const;
};

struct Annotation {
  enum class Status { Verified, Corrected };
  Status status = Status::Verified;
  std::vector<std::pair<std::string, std::string>> original;
  std::string evidence;
  std::vector<std::string> notes;

  bool corrected() const { return status == Status::Corrected; }
  // "corrected(original: ...; evidence: ...)" or "verified".
  std::string to_string() const;
};

// Parameter values for one alternative of a case ("alt: mu = 1, nu = 0").
using Binding = std::map<std::string, Rational>;
std::string to_string(const Binding& b);

// "a*d_t + b*d_x + c*d_u"; throws ParseError unless linear in the markers.
VectorField parse_vector_field(const std::string& text, const ParseContext& ctx);
// Extended operators also use d_f, d_H, d_K with element symbols f, H, K.
ExtendedField parse_extended_field(const std::string& text, const ParseContext& ctx);

struct ClassCase {
  std::string id;
  int table = 0;
  std::string row;
  EquationSpec eq;
  std::vector<VectorField> generators;
  std::vector<Binding> alternatives;
  std::vector<std::string> footnotes;  // equivalence record ids
  Annotation annotation;
};

struct EquivRecord {
  std::string id;
  std::string source, target;
  EquationSpec source_eq, target_eq;  // with source_bind / target_bind applied
  Bindings source_params, target_params;  // parameter substitutions of the binds
  PointTransformation map;
  bool push = true;  // push the source generators forward onto the target
  Annotation annotation;
};

struct CondEquivRecord {
  std::string id;
  ExtendedClass cls;
  std::vector<ExtendedField> operators;
  Annotation annotation;
};

struct AlgebraRecord {
  std::string id;
  std::vector<ExtendedField> operators;
  std::vector<std::string> op_text;
  Annotation annotation;
};

// Printed finite action of the equivalence group on (t, x, u, f, H, K).
struct GroupActionRecord {
  std::string id;
  std::array<Expr, 3> vars;   // t~, x~, u~ in t, x, u and eps1..eps7
  std::array<Expr, 3> elems;  // f~, H~, K~ as multiples of f, H, K
  Annotation annotation;
};

struct AnsatzRecord {
  std::string id;
  std::string case_id;
  EquationSpec eq;
  Ansatz ansatz;
  Expr ode;  // expected reduced equation in phi(omega)
  std::vector<ParamConstraint> constraints;
  Annotation annotation;
};

struct SolutionRecord {
  std::string id;
  std::string case_id;
  EquationSpec eq;
  Solution solution;
  std::vector<std::string> constants;
  Annotation annotation;
};

struct CLRecord {
  std::string id;
  ConservedVector cv;
  Annotation annotation;
};

struct CLRow {
  std::string id;
  EquationSpec eq;
  std::vector<std::string> laws;
  std::vector<std::string> excluded;  // parameter values that void the row, e.g. "k = 0"
  Annotation annotation;
};

struct GcsRecord {
  std::string id;
  Expr H, K, g;
  std::optional<Expr> q;
  std::vector<ParamConstraint> constraints;
  Annotation annotation;
};

struct CasebookCounts {
  int cases = 0, generators = 0, equivalences = 0, conditional = 0, ansatze = 0, solutions = 0, laws = 0,
      cl_rows = 0, gcs = 0;
};

class Casebook {
 public:
  static Casebook load(const std::string& path);
  static Casebook from_text(const std::string& text, const std::string& source = "<text>");
  std::string serialize() const;

  const std::vector<Block>& blocks() const { return blocks_; }
  const ParseContext& context() const { return ctx_; }
  CasebookCounts counts() const;

  std::vector<ClassCase> cases;
  std::vector<EquivRecord> equivalences;
  std::vector<CondEquivRecord> conditional;
  std::vector<AlgebraRecord> algebras;
  std::vector<GroupActionRecord> actions;
  std::vector<AnsatzRecord> ansatze;
  std::vector<SolutionRecord> solutions;
  std::vector<CLRecord> laws;
  std::vector<CLRow> cl_rows;
  std::vector<GcsRecord> gcs;

  const ClassCase* find_case(const std::string& id) const;
  const CLRecord* find_law(const std::string& id) const;
  const Block* find_block(const std::string& kind, const std::string& id) const;

  // Cases whose (f, H, K) equals the pattern after normalization, either as
  // stored or under one of the alternative bindings.
  struct Match {
    const ClassCase* c;
    std::optional<Binding> alternative;
  };
  std::vector<Match> lookup(const Expr& f, const Expr& H, const Expr& K) const;

  // Record rebuilt from its printed (original) values; throws if the block
  // carries no correction.
  ClassCase printed_case(const std::string& id) const;
  EquivRecord printed_equivalence(const std::string& id) const;
  AlgebraRecord printed_algebra(const std::string& id) const;
  AnsatzRecord printed_ansatz(const std::string& id) const;
  SolutionRecord printed_solution(const std::string& id) const;
  CLRecord printed_law(const std::string& id) const;
  GcsRecord printed_gcs(const std::string& id) const;

 private:
  std::string header_ = "casebook-v1";
  std::vector<Block> blocks_;
  ParseContext ctx_;

  void build();
  ClassCase make_case(const Block& b) const;
  EquivRecord make_equivalence(const Block& b) const;
  CondEquivRecord make_conditional(const Block& b) const;
  AlgebraRecord make_algebra(const Block& b) const;
  GroupActionRecord make_action(const Block& b) const;
  AnsatzRecord make_ansatz(const Block& b) const;
  SolutionRecord make_solution(const Block& b) const;
  CLRecord make_law(const Block& b) const;
  CLRow make_cl_row(const Block& b) const;
  GcsRecord make_gcs(const Block& b) const;
  EquationSpec equation_of(const Block& b, const std::string& id) const;
};

// Default path: LIESYM_CASEBOOK, else the bundled file.
std::string default_casebook_path();

}  // namespace liesym
