// Zero testing: exact normalization first, seeded sampling as fallback.
#pragma once

#include <map>
#include <string>

#include "liesym/expr.hpp"
#include "liesym/numeric.hpp"

namespace liesym {

enum class Grade { SymbolicZero, NumericZero, NonZero, Skipped };
enum class ZeroMode { Symbolic, Numeric, Auto };

const char* grade_name(Grade g);

struct ZeroVerdict {
  Grade grade = Grade::SymbolicZero;  // identity for combine
  double max_residual = 0;                    // NumericZero and NonZero
  std::map<std::string, std::string> witness;  // NonZero
  std::string reason;                          // Skipped, or why a symbolic test failed

  bool zero() const { return grade == Grade::SymbolicZero || grade == Grade::NumericZero; }
};

// Combines verdicts: NonZero dominates, then Skipped, then NumericZero.
ZeroVerdict combine(const ZeroVerdict& a, const ZeroVerdict& b);

// Symbolic mode never samples; a nonzero normal form is reported NonZero
// without witness. Numeric mode always samples.
ZeroVerdict is_zero(const Expr& e, ZeroMode mode = ZeroMode::Auto, const SampleDomain& dom = {});

// Process-wide switch: Auto behaves as Numeric while set.
void set_numeric_only(bool on);
bool numeric_only();

}  // namespace liesym
