#include "liesym/expr.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "expr_internal.hpp"
#include "liesym/function.hpp"

namespace liesym {

using namespace detail;

const char* var_name(Var v) {
  switch (v) {
    case Var::t: return "t";
    case Var::x: return "x";
    case Var::u: return "u";
    case Var::omega: return "omega";
  }
  return "?";
}

namespace detail {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  v *= 0xff51afd7ed558ccdULL;
  v ^= v >> 33;
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

static std::uint64_t hash_integer(const mpz_t z) {
  std::uint64_t h = static_cast<std::uint64_t>(z->_mp_size);
  int n = std::abs(z->_mp_size);
  for (int i = 0; i < n; ++i) h = mix(h, static_cast<std::uint64_t>(z->_mp_d[i]));
  return h;
}

std::uint64_t hash_rational(const Rational& q) {
  return mix(hash_integer(q.get_num_mpz_t()), hash_integer(q.get_den_mpz_t()));
}

}  // namespace detail

namespace {

std::uint64_t hash_poly(const Poly& p, std::uint64_t h) {
  for (const auto& t : p) {
    h = mix(h, hash_rational(t.coef));
    for (const auto& f : t.mono) h = mix(mix(h, f.gen->hash), static_cast<std::uint64_t>(f.exp));
    h = mix(h, 0x51);
  }
  return h;
}

std::uint64_t hash_rep(const RatFunc& r) {
  std::uint64_t h = hash_poly(r.num, 0x1234);
  for (const auto& d : r.den) h = mix(hash_poly(d.poly, h), static_cast<std::uint64_t>(d.mult));
  return h;
}

std::uint64_t hash_gen(const Gen& g) {
  std::uint64_t h = mix(static_cast<std::uint64_t>(g.kind) + 17, hash_string(g.name));
  h = mix(mix(h, static_cast<std::uint64_t>(g.a)), static_cast<std::uint64_t>(g.b));
  for (int d : g.deriv) h = mix(h, static_cast<std::uint64_t>(d) + 3);
  for (const auto& e : g.args) h = mix(h, e.hash());
  if (g.kind == GenKind::Pow) {
    h = mix(h, static_cast<std::uint64_t>(g.base_kind) + 101);
    if (g.base_atom) h = mix(h, g.base_atom->hash);
    if (g.base_kind == BaseKind::Prime) h = mix(h, hash_rational(Rational(g.prime)));
    h = mix(h, g.base_poly.hash());
    h = mix(h, g.piece.hash());
  }
  return h;
}

bool same_structure(const Gen& a, const Gen& b) {
  return a.kind == b.kind && a.hash == b.hash && a.name == b.name && a.a == b.a && a.b == b.b &&
         a.fn.get() == b.fn.get() && a.deriv == b.deriv && a.args == b.args &&
         a.base_kind == b.base_kind && a.base_atom == b.base_atom && a.prime == b.prime &&
         a.base_poly == b.base_poly && a.piece == b.piece;
}

struct GenPtrHash {
  std::size_t operator()(const Gen* g) const noexcept { return static_cast<std::size_t>(g->hash); }
};
struct GenPtrEq {
  bool operator()(const Gen* a, const Gen* b) const { return same_structure(*a, *b); }
};

struct InternTable {
  std::mutex mutex;
  std::unordered_set<const Gen*, GenPtrHash, GenPtrEq> set;
};

InternTable& intern_table() {
  static auto* table = new InternTable;
  return *table;
}

void collect_deps(const Expr& e, std::vector<GenRef>& out) {
  auto visit = [&](const Poly& p) {
    for (const auto& t : p)
      for (const auto& f : t.mono) out.insert(out.end(), f.gen->deps.begin(), f.gen->deps.end());
  };
  visit(e.num());
  for (const auto& d : e.den()) visit(d.poly);
}

const std::shared_ptr<const RatFunc>& zero_rep() {
  static const auto z = [] {
    RatFunc r;
    r.hash = hash_rep(r);
    return std::make_shared<const RatFunc>(std::move(r));
  }();
  return z;
}

}  // namespace

bool Gen::depends_on(GenRef leaf) const {
  return std::binary_search(deps.begin(), deps.end(), leaf);
}

namespace detail {

GenRef intern(Gen g) {
  g.hash = hash_gen(g);
  auto& table = intern_table();
  {
    std::lock_guard<std::mutex> lock(table.mutex);
    auto it = table.set.find(&g);
    if (it != table.set.end()) return *it;
  }
  std::vector<GenRef> deps;
  for (const auto& e : g.args) collect_deps(e, deps);
  if (g.base_atom) deps.insert(deps.end(), g.base_atom->deps.begin(), g.base_atom->deps.end());
  collect_deps(g.base_poly, deps);
  collect_deps(g.piece, deps);
  std::sort(deps.begin(), deps.end());
  deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
  std::lock_guard<std::mutex> lock(table.mutex);
  auto it = table.set.find(&g);
  if (it != table.set.end()) return *it;
  auto* node = new Gen(std::move(g));
  if (node->is_leaf() || node->kind == GenKind::Func) {
    auto pos = std::lower_bound(deps.begin(), deps.end(), static_cast<GenRef>(node));
    deps.insert(pos, node);
  }
  node->deps = std::move(deps);
  table.set.insert(node);
  return node;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ordering

namespace {

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int deep_compare(GenRef a, GenRef b) {
  if (int c = cmp_int(static_cast<long>(a->args.size()), static_cast<long>(b->args.size()))) return c;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (int c = compare(a->args[i], b->args[i])) return c;
  if (int c = cmp_int(static_cast<int>(a->base_kind), static_cast<int>(b->base_kind))) return c;
  if (a->base_atom != b->base_atom) {
    if (!a->base_atom) return -1;
    if (!b->base_atom) return 1;
    if (int c = compare(a->base_atom, b->base_atom)) return c;
  }
  if (int c = cmp(a->prime, b->prime)) return c < 0 ? -1 : 1;
  if (int c = compare(a->base_poly, b->base_poly)) return c;
  if (int c = compare(a->piece, b->piece)) return c;
  if (a->fn.get() != b->fn.get()) return std::less<const void*>()(a->fn.get(), b->fn.get()) ? -1 : 1;
  return 0;
}

}  // namespace

int compare(GenRef a, GenRef b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
  if (int c = cmp_int(a->a, b->a)) return c;
  if (int c = cmp_int(a->b, b->b)) return c;
  if (a->deriv != b->deriv) return a->deriv < b->deriv ? -1 : 1;
  if (a->hash != b->hash) return a->hash < b->hash ? -1 : 1;
  return deep_compare(a, b);
}

namespace detail {

int mono_cmp(const Monomial& a, const Monomial& b) {
  long i = static_cast<long>(a.size()) - 1, j = static_cast<long>(b.size()) - 1;
  while (i >= 0 || j >= 0) {
    if (i < 0) return b[j].exp > 0 ? -1 : 1;
    if (j < 0) return a[i].exp > 0 ? 1 : -1;
    int c = compare(a[i].gen, b[j].gen);
    if (c == 0) {
      if (a[i].exp != b[j].exp) return a[i].exp > b[j].exp ? 1 : -1;
      --i;
      --j;
    } else if (c > 0) {
      return a[i].exp > 0 ? 1 : -1;
    } else {
      return b[j].exp > 0 ? -1 : 1;
    }
  }
  return 0;
}

bool mono_equal(const Monomial& a, const Monomial& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].gen != b[i].gen || a[i].exp != b[i].exp) return false;
  return true;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = compare(a[i].gen, b[j].gen);
    if (c == 0) {
      int e = a[i].exp + b[j].exp;
      if (e != 0) r.push_back({a[i].gen, e});
      ++i;
      ++j;
    } else if (c < 0) {
      r.push_back(a[i++]);
    } else {
      r.push_back(b[j++]);
    }
  }
  while (i < a.size()) r.push_back(a[i++]);
  while (j < b.size()) r.push_back(b[j++]);
  return r;
}

bool poly_equal(const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!mono_equal(a[i].mono, b[i].mono) || a[i].coef != b[i].coef) return false;
  return true;
}

int poly_cmp(const Poly& a, const Poly& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = mono_cmp(a[i].mono, b[i].mono)) return c;
    if (int c = cmp(a[i].coef, b[i].coef)) return c < 0 ? -1 : 1;
  }
  return cmp_int(static_cast<long>(a.size()), static_cast<long>(b.size()));
}

void sort_combine(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return mono_cmp(x.mono, y.mono) > 0; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i + 1;
    Rational c = terms[i].coef;
    while (j < terms.size() && mono_equal(terms[j].mono, terms[i].mono)) c += terms[j++].coef;
    if (c != 0) {
      if (out != i) terms[out].mono = std::move(terms[i].mono);
      terms[out].coef = c;
      ++out;
    }
    i = j;
  }
  terms.resize(out);
}

Expr make(Poly num, std::vector<DenFactor> den) {
  RatFunc r;
  r.num = std::move(num);
  if (!r.num.empty()) r.den = std::move(den);
  r.hash = hash_rep(r);
  return Expr::from_rep(std::move(r));
}

}  // namespace detail

namespace {

Poly poly_add(const Poly& a, const Poly& b, const Rational& scale_b) {
  Poly r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = mono_cmp(a[i].mono, b[j].mono);
    if (c == 0) {
      Rational s = a[i].coef + scale_b * b[j].coef;
      if (s != 0) r.push_back({a[i].mono, s});
      ++i;
      ++j;
    } else if (c > 0) {
      r.push_back(a[i++]);
    } else {
      r.push_back({b[j].mono, scale_b * b[j].coef});
      ++j;
    }
  }
  while (i < a.size()) r.push_back(a[i++]);
  while (j < b.size()) {
    r.push_back({b[j].mono, scale_b * b[j].coef});
    ++j;
  }
  return r;
}

Poly poly_scale(const Poly& p, const Rational& c) {
  Poly r = p;
  for (auto& t : r) t.coef *= c;
  return r;
}

bool den_equal(const std::vector<DenFactor>& a, const std::vector<DenFactor>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].mult != b[i].mult || !poly_equal(a[i].poly, b[i].poly)) return false;
  return true;
}

// Adds factor multiplicities, keeping the list sorted.
std::vector<DenFactor> den_merge(const std::vector<DenFactor>& a, const std::vector<DenFactor>& b,
                                 bool take_max) {
  std::vector<DenFactor> r;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = poly_cmp(a[i].poly, b[j].poly);
    if (c == 0) {
      r.push_back({a[i].poly, take_max ? std::max(a[i].mult, b[j].mult) : a[i].mult + b[j].mult});
      ++i;
      ++j;
    } else if (c < 0) {
      r.push_back(a[i++]);
    } else {
      r.push_back(b[j++]);
    }
  }
  while (i < a.size()) r.push_back(a[i++]);
  while (j < b.size()) r.push_back(b[j++]);
  return r;
}

bool is_pow_like(GenRef g) { return g->kind == GenKind::Pow || g->kind == GenKind::Sin; }

}  // namespace

// ---------------------------------------------------------------------------
// Family canonicalization

namespace detail {

BaseSpec base_of(GenRef g) {
  BaseSpec b;
  if (g->kind == GenKind::Pow) {
    b.kind = g->base_kind;
    b.atom = g->base_atom;
    b.prime = g->prime;
    b.poly = g->base_poly;
  } else {
    b.kind = BaseKind::Atom;
    b.atom = g;
  }
  return b;
}

bool same_base(const BaseSpec& a, const BaseSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case BaseKind::E: return true;
    case BaseKind::Atom: return a.atom == b.atom;
    case BaseKind::Prime: return a.prime == b.prime;
    case BaseKind::Compound: return a.poly == b.poly;
  }
  return false;
}

}  // namespace detail

namespace {

Integer gcd_int(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

bool group_needs_canon(const Monomial& m, const std::vector<std::size_t>& idx) {
  int n_const = 0, n_fraction = 0, n_pow = 0;
  for (std::size_t i : idx) {
    GenRef g = m[i].gen;
    if (g->kind != GenKind::Pow) continue;
    ++n_pow;
    int k = m[i].exp;
    switch (g->piece_class) {
      case Gen::Piece::Unit:
      case Gen::Piece::Simple: break;
      case Gen::Piece::Const:
        ++n_const;
        if (k != 1) return true;
        break;
      case Gen::Piece::Scaled:
        if (gcd_int(Integer(k), g->piece_q) != 1) return true;
        break;
      case Gen::Piece::Fraction:
        ++n_fraction;
        if (gcd_int(Integer(k), g->piece_q) != 1) return true;
        break;
    }
  }
  if (n_const > 1 || n_fraction > 1) return true;
  if (n_fraction == 1 && n_pow > 1) return true;
  // Distinct shapes among monomial pieces.
  for (std::size_t a = 0; a < idx.size(); ++a) {
    GenRef ga = m[idx[a]].gen;
    if (ga->kind != GenKind::Pow) continue;
    if (ga->piece_class != Gen::Piece::Simple && ga->piece_class != Gen::Piece::Scaled) continue;
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      GenRef gb = m[idx[b]].gen;
      if (gb->kind != GenKind::Pow) continue;
      if (gb->piece_class != Gen::Piece::Simple && gb->piece_class != Gen::Piece::Scaled) continue;
      if (ga->piece_shape == gb->piece_shape) return true;
    }
  }
  return false;
}

// Groups factor indices by family base.
std::vector<std::vector<std::size_t>> base_groups(const Monomial& m) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<BaseSpec> bases;
  for (std::size_t i = 0; i < m.size(); ++i) {
    BaseSpec b = base_of(m[i].gen);
    bool placed = false;
    for (std::size_t k = 0; k < bases.size(); ++k) {
      if (same_base(bases[k], b)) {
        groups[k].push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) {
      bases.push_back(b);
      groups.push_back({i});
    }
  }
  return groups;
}

}  // namespace

namespace detail {

bool needs_canon(const Monomial& m) {
  bool any = false;
  for (const auto& f : m) {
    if (f.gen->kind == GenKind::Sin && f.exp != 1) return true;
    if (f.gen->kind == GenKind::Pow) any = true;
  }
  if (!any) return false;
  for (const auto& grp : base_groups(m)) {
    bool has_pow = false;
    for (std::size_t i : grp) has_pow |= m[i].gen->kind == GenKind::Pow;
    if (has_pow && group_needs_canon(m, grp)) return true;
  }
  return false;
}

Expr term_expr(const Monomial& m, const Rational& c) {
  if (c == 0) return Expr();
  return make(Poly{Term{m, c}}, {});
}

Expr poly_expr(std::vector<Term> raw) {
  std::vector<Term> clean;
  std::vector<Expr> slow;
  clean.reserve(raw.size());
  for (auto& t : raw) {
    if (t.coef == 0) continue;
    if (needs_canon(t.mono))
      slow.push_back(canon_term(t.mono, t.coef));
    else
      clean.push_back(std::move(t));
  }
  sort_combine(clean);
  Expr r = make(std::move(clean), {});
  for (const auto& s : slow) r += s;
  return r;
}

Expr total_exponent(GenRef g, int k) {
  if (g->kind == GenKind::Pow) return g->piece * Expr(k);
  return Expr(k);
}

}  // namespace detail

namespace {

std::vector<std::pair<Integer, long>> factor_integer(Integer n) {
  std::vector<std::pair<Integer, long>> out;
  if (n < 0) n = -n;
  if (n <= 1) return out;
  for (unsigned long p = 2; p < 100000; p += (p == 2 ? 1 : 2)) {
    if (Integer(p) * Integer(p) > n) break;
    long e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++e;
    }
    if (e) out.push_back({Integer(p), e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

Integer floor_rational(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

long to_long(const Integer& z) {
  if (!z.fits_slong_p()) throw Error("exponent too large");
  return z.get_si();
}

struct Piece {
  Expr piece;
  long mult;
  Gen::Piece cls;
  Integer q;
  Expr shape;
};

struct Decomp {
  Integer n = 0;
  std::vector<Piece> pieces;
};

// Division with remainder of multivariate polynomials (lex); exponents must
// stay canonical, otherwise everything is reported as remainder.
std::pair<Poly, Poly> poly_divmod(const Poly& f, const Poly& g) {
  Poly q, r, p = f;
  const Monomial& lg = g.front().mono;
  int guard = 0;
  while (!p.empty()) {
    if (++guard > 10000) return {Poly{}, f};
    const Term lt = p.front();
    // lg divides lt when every exponent of lg is positive and dominated.
    bool divides = true;
    Monomial qm;
    std::size_t i = 0;
    for (const auto& fg : lg) {
      if (fg.exp < 0) {
        divides = false;
        break;
      }
      while (i < lt.mono.size() && compare(lt.mono[i].gen, fg.gen) < 0) qm.push_back(lt.mono[i++]);
      if (i >= lt.mono.size() || lt.mono[i].gen != fg.gen || lt.mono[i].exp < fg.exp) {
        divides = false;
        break;
      }
      if (lt.mono[i].exp != fg.exp) qm.push_back({fg.gen, lt.mono[i].exp - fg.exp});
      ++i;
    }
    if (divides) {
      while (i < lt.mono.size()) qm.push_back(lt.mono[i++]);
      if (needs_canon(qm)) return {Poly{}, f};
      Rational c = lt.coef / g.front().coef;
      Poly prod;
      for (const auto& gt : g) {
        Monomial pm = mono_mul(qm, gt.mono);
        if (needs_canon(pm)) return {Poly{}, f};
        prod.push_back({std::move(pm), c * gt.coef});
      }
      sort_combine(prod);
      p = poly_add(p, prod, Rational(-1));
      q.push_back({qm, c});
    } else {
      r.push_back(lt);
      p.erase(p.begin());
    }
  }
  sort_combine(q);
  sort_combine(r);
  return {q, r};
}

void decompose_poly(const Poly& p, Decomp& d) {
  for (const auto& t : p) {
    if (t.mono.empty()) {
      Integer fl = floor_rational(t.coef);
      d.n += fl;
      Rational r = t.coef - Rational(fl);
      if (r != 0) d.pieces.push_back({Expr(r), 1, Gen::Piece::Const, r.get_den(), Expr(1)});
      continue;
    }
    Integer pn = t.coef.get_num(), qd = t.coef.get_den();
    Expr shape = term_expr(t.mono, Rational(1));
    if (qd == 1) {
      d.pieces.push_back({shape, to_long(pn), Gen::Piece::Simple, Integer(1), shape});
    } else {
      Expr piece = term_expr(t.mono, Rational(Integer(1), qd));
      d.pieces.push_back({piece, to_long(pn), Gen::Piece::Scaled, qd, shape});
    }
  }
}

Decomp decompose(const Expr& X) {
  Decomp d;
  if (X.den().empty()) {
    decompose_poly(X.num(), d);
    return d;
  }
  Expr D = denominator(X);
  if (!D.den().empty()) throw Error("internal: expanded denominator is not polynomial");
  auto [q, r] = poly_divmod(X.num(), D.num());
  decompose_poly(q, d);
  if (!r.empty()) {
    Integer g = 0, l = 1;
    for (const auto& t : r) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
    }
    Rational content(g, l);
    content.canonicalize();
    if (r.front().coef < 0) content = -content;
    Expr rprim = make(poly_scale(r, 1 / content), {});
    Integer pn = content.get_num(), qd = content.get_den();
    Expr shape = rprim / D;
    Expr piece = qd == 1 ? shape : shape / Expr(Rational(qd));
    d.pieces.push_back({piece, to_long(pn), Gen::Piece::Fraction, qd, shape});
  }
  return d;
}

GenRef pow_gen(const BaseSpec& b, const Piece& p) {
  Gen g;
  g.kind = GenKind::Pow;
  g.base_kind = b.kind;
  g.base_atom = b.atom;
  g.prime = b.kind == BaseKind::Prime ? b.prime : Integer(0);
  if (b.kind == BaseKind::Compound) g.base_poly = b.poly;
  g.piece = p.piece;
  g.piece_class = p.cls;
  g.piece_q = p.q;
  g.piece_shape = p.shape;
  return intern(std::move(g));
}

GenRef e_unit_gen() {
  static GenRef g = [] {
    BaseSpec b;
    b.kind = BaseKind::E;
    return pow_gen(b, Piece{Expr(1), 1, Gen::Piece::Unit, Integer(1), Expr(1)});
  }();
  return g;
}

struct FamilyParts {
  Rational coef = 1;
  Monomial mono;
  std::optional<std::pair<Expr, long>> compound_power;
};

FamilyParts family_parts(const BaseSpec& b, const Expr& X) {
  FamilyParts out;
  if (X.is_zero()) return out;
  Decomp d = decompose(X);
  long n = to_long(d.n);
  if (n != 0) {
    switch (b.kind) {
      case BaseKind::E: out.mono.push_back({e_unit_gen(), static_cast<int>(n)}); break;
      case BaseKind::Atom: out.mono.push_back({b.atom, static_cast<int>(n)}); break;
      case BaseKind::Prime: {
        Integer pw;
        mpz_pow_ui(pw.get_mpz_t(), b.prime.get_mpz_t(), static_cast<unsigned long>(std::labs(n)));
        out.coef = n > 0 ? Rational(pw) : Rational(Integer(1), pw);
        break;
      }
      case BaseKind::Compound: out.compound_power = std::make_pair(b.poly, n); break;
    }
  }
  for (const auto& p : d.pieces) {
    if (p.mult == 0) continue;
    out.mono.push_back({pow_gen(b, p), static_cast<int>(p.mult)});
  }
  std::sort(out.mono.begin(), out.mono.end(),
            [](const Factor& x, const Factor& y) { return compare(x.gen, y.gen) < 0; });
  return out;
}

}  // namespace

namespace detail {

Expr family(const BaseSpec& b, const Expr& X) {
  if (b.kind == BaseKind::Compound && b.poly == Expr(1)) return Expr(1);
  FamilyParts fp = family_parts(b, X);
  Expr r = term_expr(fp.mono, fp.coef);
  if (fp.compound_power) r *= pow(fp.compound_power->first, fp.compound_power->second);
  return r;
}

Expr canon_term(const Monomial& m, const Rational& c) {
  Rational coef = c;
  Monomial keep;
  std::vector<Expr> extra;
  for (const auto& grp : base_groups(m)) {
    bool has_pow = false;
    for (std::size_t i : grp) has_pow |= m[i].gen->kind == GenKind::Pow;
    if (!has_pow || !group_needs_canon(m, grp)) {
      for (std::size_t i : grp) {
        const Factor& f = m[i];
        if (f.gen->kind == GenKind::Sin && f.exp != 1) {
          // sin^2 = 1 - cos^2 keeps sine powers in {0, 1}.
          Expr cosv = cos(f.gen->args[0]);
          Expr one_minus = Expr(1) - cosv * cosv;
          int k = f.exp;
          if (k >= 2) {
            if (k % 2) keep.push_back({f.gen, 1});
            extra.push_back(pow(one_minus, k / 2));
          } else {
            int j = -k;
            if (j % 2) keep.push_back({f.gen, 1});
            extra.push_back(pow(one_minus, -((j + 1) / 2)));
          }
        } else {
          keep.push_back(f);
        }
      }
      continue;
    }
    BaseSpec b = base_of(m[grp.front()].gen);
    Expr total;
    for (std::size_t i : grp) total += total_exponent(m[i].gen, m[i].exp);
    FamilyParts fp = family_parts(b, total);
    coef *= fp.coef;
    keep.insert(keep.end(), fp.mono.begin(), fp.mono.end());
    if (fp.compound_power) extra.push_back(pow(fp.compound_power->first, fp.compound_power->second));
  }
  std::sort(keep.begin(), keep.end(),
            [](const Factor& x, const Factor& y) { return compare(x.gen, y.gen) < 0; });
  Expr r = term_expr(keep, coef);
  for (const auto& e : extra) r *= e;
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rational function arithmetic

namespace {

struct Normalized {
  Rational content;
  Monomial mono;
  Poly prim;  // single term {1} when trivial
};

Normalized normalize_poly(const Poly& p, bool restrict_mono = false) {
  Normalized n;
  Integer g = 0, l = 1;
  for (const auto& t : p) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
  }
  n.content = Rational(g, l);
  n.content.canonicalize();
  if (p.front().coef < 0) n.content = -n.content;
  // Minimal exponent of every generator over all terms (absent counts as 0).
  std::vector<Factor> mins;
  for (const auto& t : p)
    for (const auto& f : t.mono) {
      auto it = std::find_if(mins.begin(), mins.end(), [&](const Factor& x) { return x.gen == f.gen; });
      if (it == mins.end()) mins.push_back({f.gen, 0});
    }
  for (auto& mf : mins) {
    int lo = 0;
    bool first = true;
    for (const auto& t : p) {
      int e = 0;
      for (const auto& f : t.mono)
        if (f.gen == mf.gen) e = f.exp;
      lo = first ? e : std::min(lo, e);
      first = false;
    }
    mf.exp = lo;
  }
  for (const auto& mf : mins) {
    if (mf.exp == 0) continue;
    if (restrict_mono && is_pow_like(mf.gen)) continue;
    n.mono.push_back(mf);
  }
  std::sort(n.mono.begin(), n.mono.end(),
            [](const Factor& x, const Factor& y) { return compare(x.gen, y.gen) < 0; });
  Monomial inv = n.mono;
  for (auto& f : inv) f.exp = -f.exp;
  Rational ic = 1 / n.content;
  for (const auto& t : p) {
    Monomial m = mono_mul(t.mono, inv);
    if (!restrict_mono && needs_canon(m)) return normalize_poly(p, true);
    n.prim.push_back({std::move(m), t.coef * ic});
  }
  return n;
}

bool is_unit_poly(const Poly& p) { return p.size() == 1 && p[0].mono.empty() && p[0].coef == 1; }

Poly term_times(const Monomial& m, const Rational& c, const Poly& g, bool& ok) {
  Poly r;
  r.reserve(g.size());
  for (const auto& t : g) {
    Monomial pm = mono_mul(m, t.mono);
    if (needs_canon(pm)) {
      ok = false;
      return {};
    }
    r.push_back({std::move(pm), c * t.coef});
  }
  return r;
}

std::optional<Poly> exact_div(const Poly& f, const Poly& g) {
  if (f.empty()) return Poly{};
  if (f.size() < g.size()) return std::nullopt;
  // Exponent windows per generator: quotient exponents lie in
  // [min_f - min_g, max_f - max_g].
  struct Window {
    GenRef gen;
    int fmin, fmax, gmin, gmax;
  };
  std::vector<Window> win;
  auto scan = [&](const Poly& p, bool is_f) {
    for (const auto& t : p)
      for (const auto& fc : t.mono) {
        auto it = std::find_if(win.begin(), win.end(), [&](const Window& w) { return w.gen == fc.gen; });
        if (it == win.end()) {
          win.push_back({fc.gen, 0, 0, 0, 0});
          it = win.end() - 1;
        }
      }
    (void)is_f;
  };
  scan(f, true);
  scan(g, false);
  for (auto& w : win) {
    bool ff = true, gf = true;
    for (const auto& t : f) {
      int e = 0;
      for (const auto& fc : t.mono)
        if (fc.gen == w.gen) e = fc.exp;
      w.fmin = ff ? e : std::min(w.fmin, e);
      w.fmax = ff ? e : std::max(w.fmax, e);
      ff = false;
    }
    for (const auto& t : g) {
      int e = 0;
      for (const auto& fc : t.mono)
        if (fc.gen == w.gen) e = fc.exp;
      w.gmin = gf ? e : std::min(w.gmin, e);
      w.gmax = gf ? e : std::max(w.gmax, e);
      gf = false;
    }
    if (w.fmin - w.gmin > w.fmax - w.gmax) return std::nullopt;
  }
  auto in_window = [&](const Monomial& m) {
    for (const auto& w : win) {
      int e = 0;
      for (const auto& fc : m)
        if (fc.gen == w.gen) e = fc.exp;
      if (e < w.fmin - w.gmin || e > w.fmax - w.gmax) return false;
    }
    for (const auto& fc : m)
      if (std::none_of(win.begin(), win.end(), [&](const Window& w) { return w.gen == fc.gen; }))
        return false;
    return true;
  };
  Monomial lg_inv = g.front().mono;
  for (auto& x : lg_inv) x.exp = -x.exp;
  // Trailing terms must also divide.
  {
    Monomial tg_inv = g.back().mono;
    for (auto& x : tg_inv) x.exp = -x.exp;
    if (!in_window(mono_mul(f.back().mono, tg_inv))) return std::nullopt;
  }
  Poly q, r = f;
  std::size_t guard = 0;
  while (!r.empty()) {
    if (++guard > 20000) return std::nullopt;
    Monomial qm = mono_mul(r.front().mono, lg_inv);
    if (!in_window(qm) || needs_canon(qm)) return std::nullopt;
    Rational c = r.front().coef / g.front().coef;
    bool ok = true;
    Poly prod = term_times(qm, c, g, ok);
    if (!ok) return std::nullopt;
    Monomial lead = r.front().mono;
    r = poly_add(r, prod, Rational(-1));
    if (!r.empty() && mono_equal(r.front().mono, lead)) return std::nullopt;
    q.push_back({std::move(qm), c});
  }
  sort_combine(q);
  return q;
}

Expr finish(Poly num, std::vector<DenFactor> den) {
  if (num.empty()) return Expr();
  for (auto& d : den) {
    while (d.mult > 0) {
      auto q = exact_div(num, d.poly);
      if (!q) break;
      num = std::move(*q);
      --d.mult;
    }
  }
  den.erase(std::remove_if(den.begin(), den.end(), [](const DenFactor& d) { return d.mult == 0; }),
            den.end());
  return make(std::move(num), std::move(den));
}

Expr mul_poly(const Poly& a, const Poly& b) {
  std::vector<Term> raw;
  raw.reserve(a.size() * b.size());
  bool clean = true;
  for (const auto& x : a)
    for (const auto& y : b) {
      Monomial m = mono_mul(x.mono, y.mono);
      raw.push_back({std::move(m), x.coef * y.coef});
    }
  for (const auto& t : raw)
    if (needs_canon(t.mono)) {
      clean = false;
      break;
    }
  if (clean) {
    sort_combine(raw);
    return make(std::move(raw), {});
  }
  return poly_expr(std::move(raw));
}

Expr den_power_product(const std::vector<DenFactor>& den, const std::vector<DenFactor>& lcd) {
  Expr r(1);
  for (const auto& l : lcd) {
    int have = 0;
    for (const auto& d : den)
      if (poly_equal(d.poly, l.poly)) have = d.mult;
    int need = l.mult - have;
    if (need > 0) r = r * pow(make(l.poly, {}), need);
  }
  return r;
}

Expr add_impl(const Expr& a, const Expr& b, const Rational& sb) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return sb == 1 ? b : make(poly_scale(b.num(), sb), b.den());
  if (den_equal(a.den(), b.den())) {
    Poly n = poly_add(a.num(), b.num(), sb);
    if (a.den().empty()) return make(std::move(n), {});
    return finish(std::move(n), a.den());
  }
  auto lcd = den_merge(a.den(), b.den(), true);
  Expr na = make(a.num(), {}) * den_power_product(a.den(), lcd);
  Expr nb = make(poly_scale(b.num(), sb), {}) * den_power_product(b.den(), lcd);
  Expr n = na + nb;
  return with_den(n, lcd);
}

Expr inverse(const Expr& a) {
  if (a.is_zero()) throw Error("division by zero");
  Normalized n = normalize_poly(a.num());
  Expr top(1);
  for (const auto& d : a.den()) top = top * pow(make(d.poly, {}), d.mult);
  Monomial inv = n.mono;
  for (auto& f : inv) f.exp = -f.exp;
  Expr unit = poly_expr({Term{inv, 1 / n.content}});
  std::vector<DenFactor> den;
  if (!is_unit_poly(n.prim)) den.push_back({n.prim, 1});
  return with_den(top * unit, den);
}

}  // namespace

namespace detail {

Expr with_den(const Expr& num, const std::vector<DenFactor>& extra) {
  if (num.is_zero()) return Expr();
  if (extra.empty()) return num;
  return finish(num.num(), den_merge(num.den(), extra, false));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : rep_(zero_rep()) {}
Expr::Expr(int v) : Expr(Rational(v)) {}
Expr::Expr(long v) : Expr(Rational(v)) {}
Expr::Expr(const Rational& q) {
  if (q == 0) {
    rep_ = zero_rep();
    return;
  }
  RatFunc r;
  r.num.push_back({{}, q});
  r.num.back().coef.canonicalize();
  r.hash = hash_rep(r);
  rep_ = std::make_shared<const RatFunc>(std::move(r));
}

Expr Expr::from_rep(RatFunc rf) {
  Expr e;
  e.rep_ = std::make_shared<const RatFunc>(std::move(rf));
  return e;
}

Expr Expr::from_gen(GenRef g, int exp) {
  if (exp == 0) return Expr(1);
  Monomial m{{g, exp}};
  if (needs_canon(m)) return canon_term(m, Rational(1));
  return make(Poly{Term{std::move(m), Rational(1)}}, {});
}

bool Expr::is_constant() const {
  return rep_->den.empty() && (rep_->num.empty() || (rep_->num.size() == 1 && rep_->num[0].mono.empty()));
}

std::optional<Rational> Expr::as_rational() const {
  if (!is_constant()) return std::nullopt;
  if (rep_->num.empty()) return Rational(0);
  return rep_->num[0].coef;
}

GenRef Expr::as_gen() const {
  if (!rep_->den.empty() || rep_->num.size() != 1) return nullptr;
  const Term& t = rep_->num[0];
  if (t.coef != 1 || t.mono.size() != 1 || t.mono[0].exp != 1) return nullptr;
  return t.mono[0].gen;
}

Expr Expr::operator-() const {
  if (is_zero()) return *this;
  return make(poly_scale(rep_->num, Rational(-1)), rep_->den);
}

Expr& Expr::operator+=(const Expr& o) { return *this = *this + o; }
Expr& Expr::operator-=(const Expr& o) { return *this = *this - o; }
Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }
Expr& Expr::operator/=(const Expr& o) { return *this = *this / o; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.hash() != b.hash()) return false;
  return poly_equal(a.num(), b.num()) && den_equal(a.den(), b.den());
}

Expr operator+(const Expr& a, const Expr& b) { return add_impl(a, b, Rational(1)); }
Expr operator-(const Expr& a, const Expr& b) { return add_impl(a, b, Rational(-1)); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (auto c = a.as_rational()) return *c == 1 ? b : make(poly_scale(b.num(), *c), b.den());
  if (auto c = b.as_rational()) return *c == 1 ? a : make(poly_scale(a.num(), *c), a.den());
  Expr n = mul_poly(a.num(), b.num());
  if (a.den().empty() && b.den().empty()) return n;
  return with_den(n, den_merge(a.den(), b.den(), false));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (auto c = b.as_rational()) {
    if (*c == 0) throw Error("division by zero");
    return make(poly_scale(a.num(), 1 / *c), a.den());
  }
  return a * inverse(b);
}

int compare(const Expr& a, const Expr& b) {
  if (int c = poly_cmp(a.num(), b.num())) return c;
  if (int c = cmp_int(static_cast<long>(a.den().size()), static_cast<long>(b.den().size()))) return c;
  for (std::size_t i = 0; i < a.den().size(); ++i) {
    if (int c = poly_cmp(a.den()[i].poly, b.den()[i].poly)) return c;
    if (int c = cmp_int(a.den()[i].mult, b.den()[i].mult)) return c;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Atoms

namespace {

GenRef make_leaf(GenKind kind, const std::string& name, int a, int b) {
  Gen g;
  g.kind = kind;
  g.name = name;
  g.a = a;
  g.b = b;
  return intern(std::move(g));
}

}  // namespace

GenRef var_gen(Var v) {
  static const GenRef gens[4] = {make_leaf(GenKind::Var, "", 0, 0), make_leaf(GenKind::Var, "", 1, 0),
                                 make_leaf(GenKind::Var, "", 2, 0), make_leaf(GenKind::Var, "", 3, 0)};
  return gens[static_cast<int>(v)];
}

GenRef jet_gen(int nt, int nx) {
  if (nt < 0 || nx < 0 || nt + nx == 0) throw Error("invalid jet multi-index");
  return make_leaf(GenKind::Jet, "", nt, nx);
}

GenRef param_gen(const std::string& name) { return make_leaf(GenKind::Param, name, 0, 0); }
GenRef element_gen(const std::string& name) { return make_leaf(GenKind::Element, name, 0, 0); }

Expr var(Var v) { return Expr::from_gen(var_gen(v)); }
Expr jet(int nt, int nx) { return Expr::from_gen(jet_gen(nt, nx)); }
Expr param(const std::string& name) { return Expr::from_gen(param_gen(name)); }
Expr element(const std::string& name) { return Expr::from_gen(element_gen(name)); }

// ---------------------------------------------------------------------------
// Kernels

namespace detail {

GenRef ln_gen(const Expr& arg) {
  Gen g;
  g.kind = GenKind::Ln;
  g.args = {arg};
  return intern(std::move(g));
}

Expr base_expr(const BaseSpec& b) {
  switch (b.kind) {
    case BaseKind::E: return exp(Expr(1));
    case BaseKind::Atom: return Expr::from_gen(b.atom);
    case BaseKind::Prime: return Expr(Rational(b.prime));
    case BaseKind::Compound: return b.poly;
  }
  return Expr();
}

Expr ln_of_base(const BaseSpec& b) {
  switch (b.kind) {
    case BaseKind::E: return Expr(1);
    case BaseKind::Atom: return Expr::from_gen(ln_gen(Expr::from_gen(b.atom)));
    case BaseKind::Prime: return Expr::from_gen(ln_gen(Expr(Rational(b.prime))));
    case BaseKind::Compound: return Expr::from_gen(ln_gen(b.poly));
  }
  return Expr();
}

}  // namespace detail

Expr pow(const Expr& base, long n) {
  if (n == 0) return Expr(1);
  if (n < 0) return pow(inverse(base), -n);
  if (base.is_zero()) return Expr();
  if (base.den().empty() && base.num().size() == 1) {
    const Term& t = base.num()[0];
    Monomial m = t.mono;
    for (auto& f : m) f.exp = static_cast<int>(f.exp * n);
    Rational c;
    mpz_pow_ui(c.get_num_mpz_t(), t.coef.get_num_mpz_t(), static_cast<unsigned long>(n));
    mpz_pow_ui(c.get_den_mpz_t(), t.coef.get_den_mpz_t(), static_cast<unsigned long>(n));
    return poly_expr({Term{std::move(m), c}});
  }
  Expr result(1), b = base;
  while (n > 0) {
    if (n & 1) result = result * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return result;
}

namespace {

// Collects |base|^X as a product of family powers.
Expr pow_general(const Expr& base, const Expr& X) {
  if (base.is_zero()) return Expr();
  Expr result(1);
  auto mul_family = [&](const BaseSpec& b, const Expr& e) { result = result * family(b, e); };
  Normalized n = normalize_poly(base.num());
  Rational c = abs(n.content);
  for (const auto& [p, e] : factor_integer(c.get_num())) {
    BaseSpec b;
    b.kind = BaseKind::Prime;
    b.prime = p;
    mul_family(b, X * Expr(e));
  }
  for (const auto& [p, e] : factor_integer(c.get_den())) {
    BaseSpec b;
    b.kind = BaseKind::Prime;
    b.prime = p;
    mul_family(b, X * Expr(-e));
  }
  // Monomial content, merged per base.
  std::vector<std::pair<BaseSpec, Expr>> per_base;
  for (const auto& f : n.mono) {
    BaseSpec b = base_of(f.gen);
    Expr tot = total_exponent(f.gen, f.exp);
    auto it = std::find_if(per_base.begin(), per_base.end(),
                           [&](const auto& pb) { return same_base(pb.first, b); });
    if (it == per_base.end())
      per_base.push_back({b, tot});
    else
      it->second += tot;
  }
  for (const auto& [b, tot] : per_base) mul_family(b, tot * X);
  // A negative content is carried by one compound factor so that the base
  // keeps its written orientation.
  bool flip = n.content < 0;
  if (!is_unit_poly(n.prim)) {
    BaseSpec b;
    b.kind = BaseKind::Compound;
    b.poly = flip ? -make(n.prim, {}) : make(n.prim, {});
    flip = false;
    mul_family(b, X);
  }
  for (const auto& d : base.den()) {
    BaseSpec b;
    b.kind = BaseKind::Compound;
    b.poly = flip && d.mult % 2 ? -make(d.poly, {}) : make(d.poly, {});
    if (d.mult % 2) flip = false;
    mul_family(b, X * Expr(-d.mult));
  }
  return result;
}

}  // namespace

Expr pow(const Expr& base, const Expr& exponent) {
  if (auto q = exponent.as_rational()) {
    if (q->get_den() == 1 && q->get_num().fits_slong_p()) return pow(base, q->get_num().get_si());
  }
  if (auto q = base.as_rational()) {
    if (*q == 1) return Expr(1);
  }
  return pow_general(base, exponent);
}

Expr exp(const Expr& X) {
  if (X.is_zero()) return Expr(1);
  BaseSpec ebase;
  ebase.kind = BaseKind::E;
  if (!X.den().empty()) return family(ebase, X);
  Expr result(1);
  std::vector<Term> rest;
  for (const auto& t : X.num()) {
    int n_ln = 0;
    std::size_t ln_idx = 0;
    for (std::size_t i = 0; i < t.mono.size(); ++i)
      if (t.mono[i].gen->kind == GenKind::Ln) {
        n_ln += 1;
        ln_idx = i;
      }
    if (n_ln == 1 && t.mono[ln_idx].exp == 1) {
      Monomial m = t.mono;
      GenRef lg = m[ln_idx].gen;
      m.erase(m.begin() + static_cast<long>(ln_idx));
      Expr e = term_expr(m, t.coef);
      const Expr& arg = lg->args[0];
      BaseSpec b;
      if (auto q = arg.as_rational()) {
        b.kind = BaseKind::Prime;
        b.prime = q->get_num();
      } else if (GenRef ag = arg.as_gen()) {
        b.kind = BaseKind::Atom;
        b.atom = ag;
      } else {
        b.kind = BaseKind::Compound;
        b.poly = arg;
      }
      result = result * family(b, e);
    } else {
      rest.push_back(t);
    }
  }
  if (!rest.empty()) {
    sort_combine(rest);
    result = result * family(ebase, make(std::move(rest), {}));
  }
  return result;
}

Expr ln(const Expr& e) {
  if (e.is_zero()) throw Error("logarithm of zero");
  Expr result;
  Normalized n = normalize_poly(e.num());
  Rational c = abs(n.content);
  for (const auto& [p, k] : factor_integer(c.get_num()))
    result += Expr(k) * Expr::from_gen(ln_gen(Expr(Rational(p))));
  for (const auto& [p, k] : factor_integer(c.get_den()))
    result -= Expr(k) * Expr::from_gen(ln_gen(Expr(Rational(p))));
  for (const auto& f : n.mono) {
    if (f.gen->kind == GenKind::Pow)
      result += f.gen->piece * Expr(f.exp) * ln_of_base(base_of(f.gen));
    else
      result += Expr(f.exp) * Expr::from_gen(ln_gen(Expr::from_gen(f.gen)));
  }
  bool flip = n.content < 0;
  if (!is_unit_poly(n.prim)) {
    result += Expr::from_gen(ln_gen(flip ? -make(n.prim, {}) : make(n.prim, {})));
    flip = false;
  }
  for (const auto& d : e.den()) {
    bool here = flip && d.mult % 2;
    if (here) flip = false;
    result -= Expr(d.mult) * Expr::from_gen(ln_gen(here ? -make(d.poly, {}) : make(d.poly, {})));
  }
  return result;
}

namespace {

bool leading_negative(const Expr& e) { return !e.is_zero() && e.num().front().coef < 0; }

Expr trig(GenKind kind, const Expr& arg) {
  Gen g;
  g.kind = kind;
  g.args = {arg};
  return Expr::from_gen(intern(std::move(g)));
}

}  // namespace

Expr sin(const Expr& e) {
  if (e.is_zero()) return Expr();
  if (leading_negative(e)) return -trig(GenKind::Sin, -e);
  return trig(GenKind::Sin, e);
}

Expr cos(const Expr& e) {
  if (e.is_zero()) return Expr(1);
  if (leading_negative(e)) return trig(GenKind::Cos, -e);
  return trig(GenKind::Cos, e);
}

Expr atan(const Expr& e) {
  if (e.is_zero()) return Expr();
  if (leading_negative(e)) return -trig(GenKind::Atan, -e);
  return trig(GenKind::Atan, e);
}

Expr tan(const Expr& e) { return sin(e) / cos(e); }
Expr sec(const Expr& e) { return Expr(1) / cos(e); }
Expr cosh(const Expr& e) { return (exp(e) + exp(-e)) / Expr(2); }
Expr sinh(const Expr& e) { return (exp(e) - exp(-e)) / Expr(2); }
Expr tanh(const Expr& e) { return sinh(e) / cosh(e); }
Expr sqrt(const Expr& e) { return pow(e, Expr(Rational(1, 2))); }
Expr abs(const Expr& e) { return e; }
Expr sign(const Expr&) { return Expr(1); }

// ---------------------------------------------------------------------------
// Introspection

std::vector<GenRef> generators(const Expr& e) {
  std::vector<GenRef> out;
  auto visit = [&](const Poly& p) {
    for (const auto& t : p)
      for (const auto& f : t.mono) out.push_back(f.gen);
  };
  visit(e.num());
  for (const auto& d : e.den()) visit(d.poly);
  std::sort(out.begin(), out.end(), [](GenRef a, GenRef b) { return compare(a, b) < 0; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<GenRef> leaves(const Expr& e) {
  std::vector<GenRef> out;
  collect_deps(e, out);
  std::sort(out.begin(), out.end(), [](GenRef a, GenRef b) { return compare(a, b) < 0; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool depends_on(const Expr& e, GenRef leaf) {
  auto visit = [&](const Poly& p) {
    for (const auto& t : p)
      for (const auto& f : t.mono)
        if (f.gen == leaf || f.gen->depends_on(leaf)) return true;
    return false;
  };
  if (visit(e.num())) return true;
  for (const auto& d : e.den())
    if (visit(d.poly)) return true;
  return false;
}

int max_jet_order(const Expr& e) {
  int m = 0;
  for (GenRef g : leaves(e)) m = std::max(m, g->jet_order());
  return m;
}

std::size_t term_count(const Expr& e) {
  std::size_t n = e.num().size();
  for (const auto& d : e.den()) n += d.poly.size();
  return n;
}

Expr numerator(const Expr& e) { return make(e.num(), {}); }

Expr denominator(const Expr& e) {
  Expr r(1);
  for (const auto& d : e.den()) r = r * pow(make(d.poly, {}), d.mult);
  return r;
}

std::vector<std::pair<Monomial, Expr>> coefficients_in(const Expr& e, const std::vector<GenRef>& gens) {
  for (const auto& d : e.den())
    for (const auto& t : d.poly)
      for (const auto& f : t.mono)
        for (GenRef g : gens)
          if (f.gen == g || f.gen->depends_on(g)) throw Error("generator appears in a denominator");
  std::vector<std::pair<Monomial, std::vector<Term>>> groups;
  for (const auto& t : e.num()) {
    Monomial key, rest;
    for (const auto& f : t.mono) {
      bool is_key = std::find(gens.begin(), gens.end(), f.gen) != gens.end();
      if (is_key) {
        if (f.exp < 0) throw Error("negative power of a splitting generator");
        key.push_back(f);
      } else {
        for (GenRef g : gens)
          if (f.gen->depends_on(g)) throw Error("splitting generator inside a kernel: " + to_string(f.gen));
        rest.push_back(f);
      }
    }
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return mono_equal(g.first, key); });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = groups.end() - 1;
    }
    it->second.push_back({rest, t.coef});
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return mono_cmp(a.first, b.first) > 0; });
  std::vector<std::pair<Monomial, Expr>> out;
  for (auto& [key, terms] : groups) {
    sort_combine(terms);
    out.push_back({key, with_den(make(std::move(terms), {}), e.den())});
  }
  return out;
}

}  // namespace liesym

namespace liesym {

Expr sum(std::vector<Expr> parts) {
  std::vector<Term> clean;
  std::vector<Expr> rest;
  for (auto& e : parts) {
    if (e.is_zero()) continue;
    if (e.den().empty())
      clean.insert(clean.end(), e.num().begin(), e.num().end());
    else
      rest.push_back(std::move(e));
  }
  sort_combine(clean);
  std::vector<Expr> level;
  level.push_back(make(std::move(clean), {}));
  // Group equal denominators before any common-denominator work.
  std::vector<std::pair<std::vector<DenFactor>, std::vector<Term>>> groups;
  for (const auto& e : rest) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return den_equal(g.first, e.den()); });
    if (it == groups.end()) {
      groups.push_back({e.den(), {}});
      it = groups.end() - 1;
    }
    it->second.insert(it->second.end(), e.num().begin(), e.num().end());
  }
  for (auto& [den, terms] : groups) {
    sort_combine(terms);
    level.push_back(finish(std::move(terms), den));
  }
  while (level.size() > 1) {
    std::vector<Expr> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] + level[i + 1]);
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

}  // namespace liesym
