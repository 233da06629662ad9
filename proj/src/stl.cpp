#include "falsitav/stl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <unordered_map>

namespace falsitav {

double Predicate::margin(const Trace& t, std::size_t i) const {
  double m = offset;
  for (const auto& [name, coeff] : terms) m += coeff * t.signal_at(name, i);
  return m;
}

FormulaPtr Formula::make_true() {
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::True;
  return f;
}

FormulaPtr Formula::make_pred(Predicate p) {
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::Predicate;
  f->pred = std::move(p);
  return f;
}

FormulaPtr Formula::make_unary(NodeKind k, FormulaPtr c, Interval I) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->interval = I;
  f->children = {std::move(c)};
  return f;
}

FormulaPtr Formula::make_binary(NodeKind k, FormulaPtr a, FormulaPtr b,
                                Interval I) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->interval = I;
  f->children = {std::move(a), std::move(b)};
  return f;
}

std::set<std::string> Formula::referenced_signals() const {
  std::set<std::string> out;
  if (kind == NodeKind::Predicate)
    for (const auto& [name, c] : pred.terms) out.insert(name);
  for (const auto& c : children) {
    auto sub = c->referenced_signals();
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

namespace {

std::string interval_str(const Interval& I) {
  std::ostringstream os;
  os << "[" << I.lo << ",";
  if (std::isinf(I.hi))
    os << "inf)";
  else
    os << I.hi << (I.hi_strict ? ")" : "]");
  return os.str();
}

}  // namespace

std::string Formula::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case NodeKind::True:
      os << "true";
      break;
    case NodeKind::Predicate: {
      bool first = true;
      for (const auto& [n, c] : pred.terms) {
        if (!first) os << " + ";
        os << c << "*" << n;
        first = false;
      }
      if (pred.offset != 0 || first) {
        if (!first) os << " + ";
        os << pred.offset;
      }
      os << (pred.strict ? " > 0" : " >= 0");
      break;
    }
    case NodeKind::Not:
      os << "not (" << children[0]->to_string() << ")";
      break;
    case NodeKind::Or:
      os << "(" << children[0]->to_string() << " or "
         << children[1]->to_string() << ")";
      break;
    case NodeKind::And:
      os << "(" << children[0]->to_string() << " and "
         << children[1]->to_string() << ")";
      break;
    case NodeKind::Implies:
      os << "(" << children[0]->to_string() << " -> "
         << children[1]->to_string() << ")";
      break;
    case NodeKind::Next:
      os << "next (" << children[0]->to_string() << ")";
      break;
    case NodeKind::Until:
      os << "(" << children[0]->to_string() << " until_" << interval_str(interval)
         << " " << children[1]->to_string() << ")";
      break;
    case NodeKind::Release:
      os << "(" << children[0]->to_string() << " release_"
         << interval_str(interval) << " " << children[1]->to_string() << ")";
      break;
    case NodeKind::Eventually:
      os << "eventually_" << interval_str(interval) << " ("
         << children[0]->to_string() << ")";
      break;
    case NodeKind::Always:
      os << "always_" << interval_str(interval) << " ("
         << children[0]->to_string() << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::set<std::string>& signals)
      : s_(text), signals_(signals) {}

  FormulaPtr parse() {
    auto f = parse_implies();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  const std::string& s_;
  const std::set<std::string>& signals_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ == s_.size();
  }

  char peek() { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  bool try_consume(const char* tok) {
    skip_ws();
    std::size_t n = std::strlen(tok);
    if (s_.compare(pos_, n, tok) != 0) return false;
    // keywords must not be a prefix of a longer identifier
    if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
      char after = pos_ + n < s_.size() ? s_[pos_ + n] : '\0';
      if (std::isalnum(static_cast<unsigned char>(after)) || after == '_')
        return false;
    }
    pos_ += n;
    return true;
  }

  // word + optional `_[a,b]` interval, e.g. "eventually_[1,5)"
  bool try_keyword(const char* word, Interval* I) {
    skip_ws();
    std::size_t n = std::strlen(word);
    if (s_.compare(pos_, n, word) != 0) return false;
    std::size_t after = pos_ + n;
    if (after < s_.size() && s_[after] == '_') {
      char br = after + 1 < s_.size() ? s_[after + 1] : '\0';
      if (br != '[' && br != '(') return false;
      pos_ = after + 1;
      *I = parse_interval();
      return true;
    }
    char c = after < s_.size() ? s_[after] : '\0';
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
    pos_ = after;
    *I = Interval{};  // [0, inf)
    return true;
  }

  double parse_number() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected number");
    const char* start = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("expected number");
    pos_ += static_cast<std::size_t>(end - start);
    return v;
  }

  Interval parse_interval() {
    Interval I;
    skip_ws();
    if (peek() == '[')
      I.lo_strict = false;
    else if (peek() == '(')
      I.lo_strict = true;
    else
      fail("expected interval");
    ++pos_;
    I.lo = parse_number();
    if (I.lo < 0) fail("interval lower bound must be >= 0");
    skip_ws();
    if (peek() != ',') fail("expected ',' in interval");
    ++pos_;
    skip_ws();
    if (try_consume("inf")) {
      I.hi = std::numeric_limits<double>::infinity();
      I.hi_strict = true;
    } else {
      I.hi = parse_number();
    }
    skip_ws();
    if (peek() == ']')
      ;
    else if (peek() == ')')
      I.hi_strict = true;
    else
      fail("expected ']' or ')' closing interval");
    ++pos_;
    if (!(I.lo <= I.hi)) fail("empty interval");
    return I;
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= s_.size() ||
        !(std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      fail("expected identifier");
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_'))
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  // affine expression: [-] term (('+'|'-') term)*,
  // term: number ['*' ident] | ident ['*' number]
  struct Affine {
    std::vector<std::pair<std::string, double>> terms;
    double offset = 0.0;
  };

  void add_term(Affine* a, const std::string& name, double coeff) {
    for (auto& [n, c] : a->terms) {
      if (n == name) {
        c += coeff;
        return;
      }
    }
    a->terms.emplace_back(name, coeff);
  }

  void parse_term(Affine* a, double sign) {
    skip_ws();
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double num = parse_number();
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        std::size_t at = pos_;
        std::string name = parse_ident();
        check_signal(name, at);
        add_term(a, name, sign * num);
      } else {
        a->offset += sign * num;
      }
    } else {
      std::size_t at = pos_;
      std::string name = parse_ident();
      check_signal(name, at);
      double coeff = 1.0;
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        coeff = parse_number();
      }
      add_term(a, name, sign * coeff);
    }
  }

  void check_signal(const std::string& name, std::size_t at) {
    if (!signals_.count(name)) {
      pos_ = at;
      fail("unknown signal '" + name + "'");
    }
  }

  Affine parse_affine() {
    Affine a;
    skip_ws();
    double sign = 1.0;
    if (peek() == '-') {
      sign = -1.0;
      ++pos_;
    }
    parse_term(&a, sign);
    while (true) {
      skip_ws();
      char c = peek();
      if (c == '-' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '>')
        break;  // the '->' operator, not a minus sign
      if (c == '+' || c == '-') {
        ++pos_;
        parse_term(&a, c == '+' ? 1.0 : -1.0);
      } else {
        break;
      }
    }
    return a;
  }

  FormulaPtr parse_atom() {
    Affine lhs = parse_affine();
    skip_ws();
    Rel rel;
    if (try_consume(">="))
      rel = Rel::Ge;
    else if (try_consume("<="))
      rel = Rel::Le;
    else if (try_consume(">"))
      rel = Rel::Gt;
    else if (try_consume("<"))
      rel = Rel::Lt;
    else
      fail("expected comparison operator");
    Affine rhs = parse_affine();
    // normalize to margin >= 0 (or > 0)
    Predicate p;
    double flip = (rel == Rel::Ge || rel == Rel::Gt) ? 1.0 : -1.0;
    for (auto& [n, c] : lhs.terms) add_term_pred(&p, n, flip * c);
    for (auto& [n, c] : rhs.terms) add_term_pred(&p, n, -flip * c);
    p.offset = flip * (lhs.offset - rhs.offset);
    p.strict = (rel == Rel::Gt || rel == Rel::Lt);
    return Formula::make_pred(std::move(p));
  }

  void add_term_pred(Predicate* p, const std::string& name, double coeff) {
    for (auto& [n, c] : p->terms) {
      if (n == name) {
        c += coeff;
        return;
      }
    }
    p->terms.emplace_back(name, coeff);
  }

  FormulaPtr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (try_consume("true")) return Formula::make_true();
    if (try_consume("false"))
      return Formula::make_unary(NodeKind::Not, Formula::make_true());
    if (peek() == '(') {
      ++pos_;
      auto f = parse_implies();
      skip_ws();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return f;
    }
    return parse_atom();
  }

  FormulaPtr parse_unary() {
    Interval I;
    if (try_consume("not"))
      return Formula::make_unary(NodeKind::Not, parse_unary());
    if (try_consume("next"))
      return Formula::make_unary(NodeKind::Next, parse_unary());
    if (try_keyword("eventually", &I))
      return Formula::make_unary(NodeKind::Eventually, parse_unary(), I);
    if (try_keyword("always", &I))
      return Formula::make_unary(NodeKind::Always, parse_unary(), I);
    return parse_primary();
  }

  FormulaPtr parse_and() {
    auto f = parse_unary();
    while (true) {
      Interval I;
      if (try_consume("and")) {
        f = Formula::make_binary(NodeKind::And, f, parse_unary());
      } else if (try_keyword("until", &I)) {
        f = Formula::make_binary(NodeKind::Until, f, parse_unary(), I);
      } else if (try_keyword("release", &I)) {
        f = Formula::make_binary(NodeKind::Release, f, parse_unary(), I);
      } else {
        break;
      }
    }
    return f;
  }

  FormulaPtr parse_or() {
    auto f = parse_and();
    while (try_consume("or"))
      f = Formula::make_binary(NodeKind::Or, f, parse_and());
    return f;
  }

  FormulaPtr parse_implies() {
    auto f = parse_or();
    skip_ws();
    if (try_consume("->"))
      return Formula::make_binary(NodeKind::Implies, f, parse_implies());
    return f;
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text,
                         const std::set<std::string>& declared_signals) {
  Parser p(text, declared_signals);
  return p.parse();
}

// ---------------------------------------------------------------------------
// Derived-operator rewrites
// ---------------------------------------------------------------------------

FormulaPtr to_core(const FormulaPtr& phi) {
  auto neg = [](FormulaPtr f) {
    return Formula::make_unary(NodeKind::Not, std::move(f));
  };
  switch (phi->kind) {
    case NodeKind::True:
    case NodeKind::Predicate:
      return phi;
    case NodeKind::Not:
      return Formula::make_unary(NodeKind::Not, to_core(phi->children[0]));
    case NodeKind::Or:
      return Formula::make_binary(NodeKind::Or, to_core(phi->children[0]),
                                  to_core(phi->children[1]));
    case NodeKind::And:
      return neg(Formula::make_binary(NodeKind::Or, neg(to_core(phi->children[0])),
                                      neg(to_core(phi->children[1]))));
    case NodeKind::Implies:
      return Formula::make_binary(NodeKind::Or, neg(to_core(phi->children[0])),
                                  to_core(phi->children[1]));
    case NodeKind::Next:
      return Formula::make_unary(NodeKind::Next, to_core(phi->children[0]));
    case NodeKind::Until:
      return Formula::make_binary(NodeKind::Until, to_core(phi->children[0]),
                                  to_core(phi->children[1]), phi->interval);
    case NodeKind::Release:
      return neg(Formula::make_binary(NodeKind::Until,
                                      neg(to_core(phi->children[0])),
                                      neg(to_core(phi->children[1])),
                                      phi->interval));
    case NodeKind::Eventually:
      return Formula::make_binary(NodeKind::Until, Formula::make_true(),
                                  to_core(phi->children[0]), phi->interval);
    case NodeKind::Always:
      return neg(Formula::make_binary(NodeKind::Until, Formula::make_true(),
                                      neg(to_core(phi->children[0])),
                                      phi->interval));
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Robust semantics
// ---------------------------------------------------------------------------

namespace {

const double kInf = std::numeric_limits<double>::infinity();

using Cache = std::unordered_map<const Formula*, std::vector<double>>;

const std::vector<double>& rob_rec(const FormulaPtr& phi, const Trace& t,
                                   Cache& cache) {
  auto it = cache.find(phi.get());
  if (it != cache.end()) return it->second;
  std::size_t n = t.size();
  std::vector<double> r(n);
  switch (phi->kind) {
    case NodeKind::True:
      std::fill(r.begin(), r.end(), kInf);
      break;
    case NodeKind::Predicate:
      for (std::size_t i = 0; i < n; ++i) r[i] = phi->pred.margin(t, i);
      break;
    case NodeKind::Not: {
      const auto& c = rob_rec(phi->children[0], t, cache);
      for (std::size_t i = 0; i < n; ++i) r[i] = -c[i];
      break;
    }
    case NodeKind::Or: {
      const auto& a = rob_rec(phi->children[0], t, cache);
      const auto& b = rob_rec(phi->children[1], t, cache);
      for (std::size_t i = 0; i < n; ++i) r[i] = std::max(a[i], b[i]);
      break;
    }
    case NodeKind::Next: {
      const auto& c = rob_rec(phi->children[0], t, cache);
      for (std::size_t i = 0; i + 1 < n; ++i) r[i] = c[i + 1];
      r[n - 1] = -kInf;
      break;
    }
    case NodeKind::Until: {
      const auto& a = rob_rec(phi->children[0], t, cache);
      const auto& b = rob_rec(phi->children[1], t, cache);
      for (std::size_t i = 0; i < n; ++i) {
        double best = -kInf;
        double runmin = kInf;  // min of a over [i, j)
        for (std::size_t j = i; j < n; ++j) {
          if (phi->interval.contains(t.time(j) - t.time(i)))
            best = std::max(best, std::min(b[j], runmin));
          runmin = std::min(runmin, a[j]);
        }
        r[i] = best;
      }
      break;
    }
    default:
      throw std::logic_error("rob_rec expects a core formula");
  }
  return cache.emplace(phi.get(), std::move(r)).first->second;
}

}  // namespace

std::vector<double> robustness_all(const FormulaPtr& phi, const Trace& t) {
  if (t.empty()) throw TraceError("robustness on empty trace");
  auto core = to_core(phi);
  Cache cache;
  return rob_rec(core, t, cache);
}

double robustness(const FormulaPtr& phi, const Trace& t, std::size_t i) {
  auto r = robustness_all(phi, t);
  if (i >= r.size()) throw TraceError("robustness index out of range");
  return r[i];
}

// ---------------------------------------------------------------------------
// Boolean semantics (independent cross-check)
// ---------------------------------------------------------------------------

namespace {

using BCache = std::unordered_map<const Formula*, std::vector<signed char>>;

bool bool_rec(const FormulaPtr& phi, const Trace& t, std::size_t i,
              BCache& cache) {
  auto& memo = cache[phi.get()];
  if (memo.empty()) memo.assign(t.size(), -1);
  if (memo[i] >= 0) return memo[i] != 0;
  bool v = false;
  std::size_t n = t.size();
  switch (phi->kind) {
    case NodeKind::True:
      v = true;
      break;
    case NodeKind::Predicate: {
      double m = phi->pred.margin(t, i);
      v = phi->pred.strict ? (m > 0) : (m >= 0);
      break;
    }
    case NodeKind::Not:
      v = !bool_rec(phi->children[0], t, i, cache);
      break;
    case NodeKind::Or:
      v = bool_rec(phi->children[0], t, i, cache) ||
          bool_rec(phi->children[1], t, i, cache);
      break;
    case NodeKind::And:
      v = bool_rec(phi->children[0], t, i, cache) &&
          bool_rec(phi->children[1], t, i, cache);
      break;
    case NodeKind::Implies:
      v = !bool_rec(phi->children[0], t, i, cache) ||
          bool_rec(phi->children[1], t, i, cache);
      break;
    case NodeKind::Next:
      v = (i + 1 < n) && bool_rec(phi->children[0], t, i + 1, cache);
      break;
    case NodeKind::Until: {
      v = false;
      for (std::size_t j = i; j < n && !v; ++j) {
        if (!phi->interval.contains(t.time(j) - t.time(i))) continue;
        if (!bool_rec(phi->children[1], t, j, cache)) continue;
        bool all = true;
        for (std::size_t k = i; k < j && all; ++k)
          all = bool_rec(phi->children[0], t, k, cache);
        v = all;
      }
      break;
    }
    case NodeKind::Release: {
      v = true;
      for (std::size_t j = i; j < n && v; ++j) {
        if (!phi->interval.contains(t.time(j) - t.time(i))) continue;
        if (bool_rec(phi->children[1], t, j, cache)) continue;
        bool released = false;
        for (std::size_t k = i; k < j && !released; ++k)
          released = bool_rec(phi->children[0], t, k, cache);
        v = released;
      }
      break;
    }
    case NodeKind::Eventually: {
      v = false;
      for (std::size_t j = i; j < n && !v; ++j)
        if (phi->interval.contains(t.time(j) - t.time(i)))
          v = bool_rec(phi->children[0], t, j, cache);
      break;
    }
    case NodeKind::Always: {
      v = true;
      for (std::size_t j = i; j < n && v; ++j)
        if (phi->interval.contains(t.time(j) - t.time(i)))
          v = bool_rec(phi->children[0], t, j, cache);
      break;
    }
  }
  memo[i] = v ? 1 : 0;
  return v;
}

}  // namespace

bool eval_boolean(const FormulaPtr& phi, const Trace& t, std::size_t i) {
  if (i >= t.size()) throw TraceError("eval_boolean index out of range");
  BCache cache;
  return bool_rec(phi, t, i, cache);
}

}  // namespace falsitav
