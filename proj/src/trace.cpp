#include "falsitav/trace.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "falsitav/util.hpp"
#include "json.hpp"

namespace falsitav {

Trace::Trace(std::vector<std::string> signal_names)
    : names_(std::move(signal_names)) {}

void Trace::push_back(double time, const std::vector<double>& values) {
  if (values.size() != names_.size())
    throw TraceError("sample has " + std::to_string(values.size()) +
                     " values, trace declares " + std::to_string(names_.size()) +
                     " signals");
  times_.push_back(time);
  data_.insert(data_.end(), values.begin(), values.end());
}

std::optional<std::size_t> Trace::signal_index(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

double Trace::signal_at(std::string_view name, std::size_t i) const {
  auto idx = signal_index(name);
  if (!idx) throw TraceError("unknown signal: " + std::string(name));
  if (i >= size())
    throw TraceError("sample index " + std::to_string(i) +
                     " out of range (trace has " + std::to_string(size()) +
                     " samples)");
  return data_[i * names_.size() + *idx];
}

double Trace::value(std::size_t signal, std::size_t i) const {
  return data_.at(i * names_.size() + signal);
}

void Trace::to_csv(std::ostream& os) const {
  os << "time";
  for (const auto& n : names_) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    os << format_double(times_[i]);
    for (std::size_t s = 0; s < names_.size(); ++s)
      os << ',' << format_double(data_[i * names_.size() + s]);
    os << '\n';
  }
}

Trace Trace::from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw TraceError("empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  if (cols.empty() || cols[0] != "time")
    throw TraceError("trace CSV header must start with 'time'");
  Trace t(std::vector<std::string>(cols.begin() + 1, cols.end()));
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw TraceError("bad number '" + tok + "' at line " +
                         std::to_string(row));
      }
    }
    if (vals.size() != cols.size())
      throw TraceError("row " + std::to_string(row) + " has " +
                       std::to_string(vals.size()) + " fields, expected " +
                       std::to_string(cols.size()));
    t.push_back(vals[0], std::vector<double>(vals.begin() + 1, vals.end()));
  }
  return t;
}

std::vector<std::string> validate_trace(const Trace& t) {
  std::vector<std::string> errs;
  if (t.empty()) {
    errs.push_back("trace is empty");
    return errs;
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    double ti = t.time(i);
    if (!std::isfinite(ti) || ti < 0)
      errs.push_back("bad time at index " + std::to_string(i));
    if (i > 0 && !(t.time(i - 1) < ti))
      errs.push_back("non-increasing time at index " + std::to_string(i));
    for (std::size_t s = 0; s < t.signal_names().size(); ++s) {
      if (!std::isfinite(t.value(s, i)))
        errs.push_back("non-finite value for signal '" + t.signal_names()[s] +
                       "' at index " + std::to_string(i));
    }
  }
  return errs;
}

std::vector<std::string> ParameterSpace::validate() const {
  std::vector<std::string> errs;
  std::vector<std::string> seen;
  auto check_name = [&](const std::string& n) {
    if (std::find(seen.begin(), seen.end(), n) != seen.end())
      errs.push_back("duplicate parameter name: " + n);
    seen.push_back(n);
  };
  for (const auto& d : discrete) {
    check_name(d.name);
    if (d.levels.empty())
      errs.push_back("discrete parameter '" + d.name + "' has empty domain");
  }
  for (const auto& c : continuous) {
    check_name(c.name);
    if (!(c.lower < c.upper))
      errs.push_back("continuous parameter '" + c.name +
                     "' needs lower < upper");
  }
  return errs;
}

std::vector<int> ParameterSpace::discrete_sizes() const {
  std::vector<int> v;
  v.reserve(discrete.size());
  for (const auto& d : discrete) v.push_back(static_cast<int>(d.levels.size()));
  return v;
}

std::string ParameterSpace::to_json_string() const {
  nlohmann::json j;
  j["discrete"] = nlohmann::json::array();
  for (const auto& d : discrete)
    j["discrete"].push_back({{"name", d.name}, {"levels", d.levels}});
  j["continuous"] = nlohmann::json::array();
  for (const auto& c : continuous)
    j["continuous"].push_back(
        {{"name", c.name}, {"lower", c.lower}, {"upper", c.upper}});
  return j.dump(2);
}

ParameterSpace ParameterSpace::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ParameterSpace s;
  for (const auto& d : j.value("discrete", nlohmann::json::array())) {
    DiscreteParam p;
    p.name = d.at("name").get<std::string>();
    p.levels = d.at("levels").get<std::vector<std::string>>();
    s.discrete.push_back(std::move(p));
  }
  for (const auto& c : j.value("continuous", nlohmann::json::array())) {
    s.continuous.push_back({c.at("name").get<std::string>(),
                            c.at("lower").get<double>(),
                            c.at("upper").get<double>()});
  }
  auto errs = s.validate();
  if (!errs.empty()) throw TraceError("invalid parameter space: " + errs[0]);
  return s;
}

std::vector<std::string> validate_valuation(const ParameterSpace& space,
                                            const ParamValuation& v) {
  std::vector<std::string> errs;
  for (const auto& d : space.discrete) {
    auto it = v.discrete_choice.find(d.name);
    if (it == v.discrete_choice.end())
      errs.push_back("missing discrete choice for '" + d.name + "'");
    else if (it->second >= d.levels.size())
      errs.push_back("choice for '" + d.name + "' out of range");
  }
  for (const auto& c : space.continuous) {
    auto it = v.continuous_value.find(c.name);
    if (it == v.continuous_value.end())
      errs.push_back("missing continuous value for '" + c.name + "'");
    else if (it->second < c.lower || it->second > c.upper)
      errs.push_back("value for '" + c.name + "' outside [" +
                     std::to_string(c.lower) + ", " + std::to_string(c.upper) +
                     "]");
  }
  return errs;
}

}  // namespace falsitav
