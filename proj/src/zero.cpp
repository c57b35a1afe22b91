#include "liesym/zero.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "liesym/function.hpp"

namespace liesym {

const char* grade_name(Grade g) {
  switch (g) {
    case Grade::SymbolicZero: return "SymbolicZero";
    case Grade::NumericZero: return "NumericZero";
    case Grade::NonZero: return "NonZero";
    case Grade::Skipped: return "Skipped";
  }
  return "?";
}

namespace {

bool g_numeric_only = false;

int rank(Grade g) {
  switch (g) {
    case Grade::SymbolicZero: return 0;
    case Grade::NumericZero: return 1;
    case Grade::Skipped: return 2;
    case Grade::NonZero: return 3;
  }
  return 3;
}

// Leaves of e plus the parameters hidden in function rules.
std::vector<GenRef> sample_leaves(const Expr& e) {
  std::vector<GenRef> out;
  std::set<GenRef> seen;
  std::set<const FunctionSpec*> visited;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    for (GenRef g : leaves(x)) {
      if (g->kind == GenKind::Func) {
        const FunctionSpec* fn = g->fn.get();
        if ((fn->mode == FunctionSpec::Mode::LogDerivative || fn->mode == FunctionSpec::Mode::ClosedForm) &&
            visited.insert(fn).second)
          walk(fn->rule);
      }
      if (seen.insert(g).second) out.push_back(g);
    }
  };
  walk(e);
  return out;
}

ZeroVerdict sample(const Expr& e, const SampleDomain& dom) {
  ZeroVerdict v;
  std::vector<GenRef> ls = sample_leaves(e);
  Sampler sampler(dom);
  int good = 0, retries = 0;
  Real worst = 0;
  while (good < dom.points) {
    Assignment a = sampler.draw(ls);
    Residual r;
    try {
      r = eval_residual(e, a);
    } catch (const SingularPoint&) {
      if (++retries > dom.max_retries) {
        v.grade = Grade::Skipped;
        v.reason = "too many singular sample points";
        return v;
      }
      continue;
    }
    ++good;
    Real rel = r.scale == 0 ? Real(0) : abs(r.value) / r.scale;
    if (rel > worst) worst = rel;
    if (rel > dom.tolerance) {
      v.grade = Grade::NonZero;
      v.max_residual = static_cast<double>(rel);
      for (const auto& [g, x] : a.values) v.witness[to_string(g)] = format_real(x, 17);
      return v;
    }
  }
  v.grade = Grade::NumericZero;
  v.max_residual = static_cast<double>(worst);
  return v;
}

}  // namespace

ZeroVerdict combine(const ZeroVerdict& a, const ZeroVerdict& b) {
  const ZeroVerdict& w = rank(a.grade) >= rank(b.grade) ? a : b;
  ZeroVerdict r = w;
  r.max_residual = std::max(a.max_residual, b.max_residual);
  return r;
}

void set_numeric_only(bool on) { g_numeric_only = on; }
bool numeric_only() { return g_numeric_only; }

ZeroVerdict is_zero(const Expr& e, ZeroMode mode, const SampleDomain& dom) {
  ZeroVerdict v;
  if (g_numeric_only && mode == ZeroMode::Auto) mode = ZeroMode::Numeric;
  if (mode != ZeroMode::Numeric && e.is_zero()) {
    v.grade = Grade::SymbolicZero;
    return v;
  }
  if (mode == ZeroMode::Symbolic) {
    v.grade = Grade::NonZero;
    v.reason = "normal form is not zero";
    return v;
  }
  return sample(e, dom);
}

}  // namespace liesym
