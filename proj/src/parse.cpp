#include "liesym/parse.hpp"

#include <cctype>

#include "liesym/function.hpp"

namespace liesym {

const ParseContext& ParseContext::standard() {
  static const ParseContext ctx = [] {
    ParseContext c;
    for (const char* p : {"mu", "nu", "lambda", "gamma", "alpha", "beta", "gamma0", "gamma1", "c0", "c1",
                          "c2", "c3", "c4", "k", "c", "eps", "a", "b", "d", "h0", "H0", "zeta0"})
      c.params.insert(p);
    for (const char* f : {"f", "H", "K", "IH", "IK", "g", "h", "q", "phi", "psi", "tau", "xi", "eta"})
      c.declare_function(std_function(f));
    return c;
  }();
  return ctx;
}

ParseContext& ParseContext::declare_param(const std::string& name) {
  params.insert(name);
  return *this;
}

ParseContext& ParseContext::declare_function(FunctionRef fn) {
  functions[fn->name] = std::move(fn);
  return *this;
}

ParseContext& ParseContext::declare_element(const std::string& name) {
  elements.insert(name);
  return *this;
}

namespace {

class Parser {
 public:
  Parser(const std::string& s, const ParseContext& c) : src_(s), ctx_(c) {}

  Expr run() {
    skip();
    if (pos_ >= src_.size()) fail("empty expression");
    Expr e = expr();
    skip();
    if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  const std::string& src_;
  const ParseContext& ctx_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t p) const { throw ParseError(msg, p); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < src_.size() && src_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (peek('/')) {
        std::size_t at = pos_++;
        Expr d = unary();
        if (d.is_zero()) fail_at("division by zero", at);
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr b = primary();
    if (accept('^')) {
      std::size_t at = pos_;
      Expr e = unary();
      if (b.is_zero()) {
        auto q = e.as_rational();
        if (q && *q <= 0) fail_at("zero raised to a nonpositive power", at);
      }
      return pow(b, e);
    }
    return b;
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Integer whole(src_.substr(start, pos_ - start));
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      std::size_t fs = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      std::string frac = src_.substr(fs, pos_ - fs);
      if (frac.empty()) fail("malformed number");
      Integer scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
      Rational q(whole * scale + Integer(frac), scale);
      q.canonicalize();
      return Expr(q);
    }
    return Expr(Rational(whole));
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    return src_.substr(start, pos_ - start);
  }

  std::vector<Expr> args() {
    std::vector<Expr> a;
    expect('(');
    a.push_back(expr());
    while (accept(',')) a.push_back(expr());
    expect(')');
    return a;
  }

  void reject_suffix() {
    if (pos_ < src_.size() && src_[pos_] == '_')
      fail("derivative-suffix notation is not part of the grammar; use total derivatives");
  }

  Expr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      reject_suffix();
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (c == '_') fail("derivative-suffix notation is not part of the grammar; use total derivatives");
    if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");
    std::size_t start = pos_;
    std::string name = ident();
    if (name == "D" && pos_ < src_.size() && src_[pos_] == '[') return multi_derivative(start);
    int primes = 0;
    while (pos_ < src_.size() && src_[pos_] == '\'') {
      ++pos_;
      ++primes;
    }
    skip();
    bool call = pos_ < src_.size() && src_[pos_] == '(';
    if (call) {
      std::vector<Expr> a = args();
      reject_suffix();
      return apply(name, primes, std::move(a), start);
    }
    if (primes) fail_at("primes are only allowed on function applications", start);
    return symbol(name, start);
  }

  Expr multi_derivative(std::size_t start) {
    ++pos_;
    std::vector<int> d;
    do {
      skip();
      std::size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (s == pos_) fail("expected derivative order");
      d.push_back(std::stoi(src_.substr(s, pos_ - s)));
    } while (accept(','));
    expect(']');
    std::string name = ident();
    auto it = ctx_.functions.find(name);
    if (it == ctx_.functions.end()) fail_at("unknown function '" + name + "'", start);
    std::vector<Expr> a = args();
    if (a.size() != d.size()) fail_at("derivative multi-index does not match arity", start);
    try {
      return func(it->second, std::move(a), std::move(d));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail_at(e.what(), start);
    }
  }

  Expr apply(const std::string& name, int primes, std::vector<Expr> a, std::size_t start) {
    auto one = [&]() -> const Expr& {
      if (a.size() != 1) fail_at(name + " takes one argument", start);
      return a[0];
    };
    if (primes == 0) {
      try {
        if (name == "exp") return exp(one());
        if (name == "ln" || name == "log") return ln(one());
        if (name == "sin") return sin(one());
        if (name == "cos") return cos(one());
        if (name == "tan") return tan(one());
        if (name == "sec") return sec(one());
        if (name == "cosh") return cosh(one());
        if (name == "sinh") return sinh(one());
        if (name == "tanh") return tanh(one());
        if (name == "atan" || name == "arctan") return atan(one());
        if (name == "sqrt") return sqrt(one());
        if (name == "abs") return abs(one());
        if (name == "sign") return sign(one());
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        fail_at(e.what(), start);
      }
    }
    auto it = ctx_.functions.find(name);
    if (it == ctx_.functions.end()) fail_at("unknown function '" + name + "'", start);
    const FunctionRef& fn = it->second;
    if (static_cast<int>(a.size()) != fn->arity) fail_at("wrong number of arguments for " + name, start);
    if (primes && fn->arity != 1) fail_at("primes need a unary function; use D[...]", start);
    std::vector<int> d(a.size(), 0);
    if (primes) d[0] = primes;
    try {
      return func(fn, std::move(a), std::move(d));
    } catch (const Error& e) {
      fail_at(e.what(), start);
    }
  }

  Expr symbol(const std::string& name, std::size_t start) {
    if (name == "t") return var(Var::t);
    if (name == "x") return var(Var::x);
    if (name == "u") return var(Var::u);
    if (name == "omega") return var(Var::omega);
    if (name.size() > 2 && name[0] == 'u' && name[1] == '_') {
      int nt = 0, nx = 0;
      bool ok = true;
      for (std::size_t i = 2; i < name.size(); ++i) {
        if (name[i] == 't')
          ++nt;
        else if (name[i] == 'x')
          ++nx;
        else
          ok = false;
      }
      if (ok) {
        if (nt + nx > ctx_.max_jet_order)
          fail_at("jet order " + std::to_string(nt + nx) + " exceeds " + std::to_string(ctx_.max_jet_order), start);
        return jet(nt, nx);
      }
    }
    if (ctx_.params.count(name)) return param(name);
    if (ctx_.elements.count(name)) return element(name);
    if (ctx_.functions.count(name)) fail_at("function '" + name + "' needs an argument", start);
    fail_at("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

Expr parse(const std::string& text, const ParseContext& ctx) { return Parser(text, ctx).run(); }

}  // namespace liesym
