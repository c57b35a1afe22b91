// Verification suites over the casebook and the report they produce.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liesym/casebook.hpp"

namespace liesym {

struct Entry {
  std::string id;
  std::string operation;
  Grade grade = Grade::Skipped;
  // Entries for the printed text of a corrected record expect NonZero.
  bool expect_nonzero = false;
  std::string detail;      // reason, witness or residual size
  std::string multiplier;  // multiplier, characteristic or reduction ratio
  std::string annotation;  // verbatim casebook annotation when corrected
  double seconds = 0;

  bool failed() const;
};

struct Report {
  std::string casebook_version = "casebook-v1";
  std::uint64_t seed = 0;
  std::vector<Entry> entries;

  void sort();
  bool failed() const;
  int count(Grade g) const;
};

// Natural order: digit runs compare numerically, so T1.C2 < T1.C10.
bool natural_less(const std::string& a, const std::string& b);

struct SuiteOptions {
  ZeroMode mode = ZeroMode::Auto;
  std::optional<int> table;
  std::optional<std::string> case_id;
};

// Every generator of every case (and alternative), plus one entry per
// corrected case for its printed form.
Report verify_symmetries(const Casebook& cb, const SuiteOptions& opt = {});
// Footnote and hodograph maps with pushed-forward generators, the
// equivalence algebra, the conditional rows and the group action.
Report verify_equivalences(const Casebook& cb, const SuiteOptions& opt = {});
Report verify_reductions(const Casebook& cb, const SuiteOptions& opt = {});
Report verify_solutions(const Casebook& cb, const SuiteOptions& opt = {});
Report verify_conservation_laws(const Casebook& cb, const SuiteOptions& opt = {});
// System and full criteria per triple, five seeded negative controls that
// both criteria must reject, and the case C scaffold.
Report verify_gcs(const Casebook& cb, const SuiteOptions& opt = {});

// Seeded members of the class with random group parameters.
Report verify_group_action(const GroupActionRecord& rec, int members, std::uint64_t seed);

std::string to_text(const Report& r);
std::string to_json(const Report& r, int indent = 2);

}  // namespace liesym
