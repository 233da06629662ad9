#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace falsitav {

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Time-indexed sequence of named real-valued signal samples. Immutable once
// built (push_back during construction only); safe to share across threads.
class Trace {
 public:
  explicit Trace(std::vector<std::string> signal_names);

  void push_back(double time, const std::vector<double>& values);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double time(std::size_t i) const { return times_.at(i); }

  const std::vector<std::string>& signal_names() const { return names_; }
  std::optional<std::size_t> signal_index(std::string_view name) const;

  // Stored value, no interpolation. Throws TraceError on unknown signal or
  // out-of-range index.
  double signal_at(std::string_view name, std::size_t i) const;
  double value(std::size_t signal, std::size_t i) const;

  void to_csv(std::ostream& os) const;
  static Trace from_csv(std::istream& is);

 private:
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<double> data_;  // row-major, size() * names_.size()
};

// Returns every invariant violation (empty list == valid): non-empty,
// strictly increasing finite times, all values finite.
std::vector<std::string> validate_trace(const Trace& t);

struct DiscreteParam {
  std::string name;
  std::vector<std::string> levels;
};

struct ContinuousParam {
  std::string name;
  double lower;
  double upper;
};

// Ordered mixed space of finite discrete domains and bounded intervals.
struct ParameterSpace {
  std::vector<DiscreteParam> discrete;
  std::vector<ContinuousParam> continuous;

  std::vector<std::string> validate() const;
  std::vector<int> discrete_sizes() const;

  std::string to_json_string() const;
  static ParameterSpace from_json_string(const std::string& text);
};

struct ParamValuation {
  std::map<std::string, std::size_t> discrete_choice;
  std::map<std::string, double> continuous_value;
};

// Checks indices against domain sizes and values against bounds.
std::vector<std::string> validate_valuation(const ParameterSpace& space,
                                            const ParamValuation& v);

}  // namespace falsitav
