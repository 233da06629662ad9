#pragma once

#include <limits>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "falsitav/trace.hpp"

namespace falsitav {

// Robustness value of a saturated boolean scene atom. Signals carrying
// truth values are stored as +/-kBoolSaturation so that min/max against
// real-valued distance margins resolves to the distance terms.
inline constexpr double kBoolSaturation = 1e4;

enum class NodeKind {
  True,
  Predicate,
  Not,
  Or,
  And,
  Implies,
  Next,
  Until,
  Release,
  Eventually,
  Always,
};

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool lo_strict = false;
  bool hi_strict = false;

  bool contains(double x) const {
    if (lo_strict ? !(x > lo) : !(x >= lo)) return false;
    return hi_strict ? (x < hi) : (x <= hi);
  }
};

enum class Rel { Ge, Gt, Le, Lt };

// Atomic comparison, normalized so the satisfied region is margin >= 0
// (margin > 0 when strict). margin(i) = sum coeff_j * signal_j(i) + offset.
struct Predicate {
  std::vector<std::pair<std::string, double>> terms;
  double offset = 0.0;
  bool strict = false;

  double margin(const Trace& t, std::size_t i) const;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  NodeKind kind;
  Interval interval;              // temporal kinds only
  std::vector<FormulaPtr> children;
  Predicate pred;                 // Predicate kind only

  static FormulaPtr make_true();
  static FormulaPtr make_pred(Predicate p);
  static FormulaPtr make_unary(NodeKind k, FormulaPtr c, Interval I = {});
  static FormulaPtr make_binary(NodeKind k, FormulaPtr a, FormulaPtr b,
                                Interval I = {});

  // Signal names referenced anywhere in the formula.
  std::set<std::string> referenced_signals() const;

  std::string to_string() const;
};

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"),
        offset(off) {}
};

// Concrete syntax, precedence low to high: `->`, `or`, {`and`, `until_I`,
// `release_I`}, unary {`not`, `next`, `eventually_I`, `always_I`}, atoms.
// Intervals `_[a,b]`, `_[a,b)`, `_[a,inf)`; omitted interval means [0,inf).
// Atoms are affine comparisons over declared signals, e.g. `speed - 0.5 > 0`.
FormulaPtr parse_formula(const std::string& text,
                         const std::set<std::string>& declared_signals);

// Rewrites derived operators down to the core {True, Predicate, Not, Or,
// Next, Until}: And/Implies via De Morgan, Eventually = True Until,
// Always = not Eventually not, Release by duality.
FormulaPtr to_core(const FormulaPtr& phi);

// Robust semantics at sample index i; +/-inf only from True/False leaves,
// Next past trace end, or boolean-atom saturation.
double robustness(const FormulaPtr& phi, const Trace& t, std::size_t i);

// Robustness at every sample index (bottom-up dynamic programming).
std::vector<double> robustness_all(const FormulaPtr& phi, const Trace& t);

// Classical Boolean semantics, implemented as an independent recursion
// (existential/universal quantification over indices, no min/max reuse).
bool eval_boolean(const FormulaPtr& phi, const Trace& t, std::size_t i);

}  // namespace falsitav
