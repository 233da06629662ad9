#include "falsitav/covering.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "falsitav/util.hpp"

namespace falsitav {

std::string MissingCombination::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << " ";
    os << "p" << (params[i] + 1) << "=" << levels[i];
  }
  return os.str();
}

namespace {

void check_args(int t, const std::vector<int>& domains) {
  int k = static_cast<int>(domains.size());
  if (t < 1 || t > k)
    throw std::invalid_argument("strength t must be in [1, k]");
  for (int v : domains)
    if (v < 1) throw std::invalid_argument("domain sizes must be >= 1");
}

std::vector<std::vector<int>> t_subsets(int k, int t) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(t);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = t - 1;
    while (i >= 0 && idx[i] == k - t + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < t; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

// Dense coverage bookkeeping: one bit per (t-subset, mixed-radix assignment).
struct CoverageMap {
  int t, k;
  std::vector<int> domains;
  std::vector<std::vector<int>> subsets;
  std::vector<std::size_t> base;        // bit offset per subset
  std::vector<std::vector<int>> by_param;  // subset indices containing p
  std::vector<char> covered;
  std::size_t uncovered_total = 0;
  // uncovered combination count per (param, level), for AETG first picks
  std::vector<std::vector<long long>> level_count;

  CoverageMap(int t_, const std::vector<int>& domains_)
      : t(t_), k(static_cast<int>(domains_.size())), domains(domains_) {
    subsets = t_subsets(k, t);
    base.resize(subsets.size());
    by_param.assign(k, {});
    std::size_t total = 0;
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      base[s] = total;
      std::size_t w = 1;
      for (int p : subsets[s]) {
        w *= static_cast<std::size_t>(domains[p]);
        by_param[p].push_back(static_cast<int>(s));
      }
      total += w;
    }
    covered.assign(total, 0);
    uncovered_total = total;
    level_count.resize(k);
    for (int p = 0; p < k; ++p) level_count[p].assign(domains[p], 0);
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      std::size_t w = 1;
      for (int p : subsets[s]) w *= static_cast<std::size_t>(domains[p]);
      for (int p : subsets[s]) {
        long long others = static_cast<long long>(w / domains[p]);
        for (int l = 0; l < domains[p]; ++l) level_count[p][l] += others;
      }
    }
  }

  std::size_t rank(int s, const std::vector<int>& row) const {
    std::size_t r = 0;
    for (int p : subsets[s]) r = r * domains[p] + static_cast<std::size_t>(row[p]);
    return base[s] + r;
  }

  bool is_covered(int s, const std::vector<int>& row) const {
    return covered[rank(s, row)] != 0;
  }

  void mark_row(const std::vector<int>& row) {
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      std::size_t r = rank(static_cast<int>(s), row);
      if (covered[r]) continue;
      covered[r] = 1;
      --uncovered_total;
      for (int p : subsets[s]) --level_count[p][row[p]];
    }
  }

  // Newly covered combinations if `row` were added (only subsets whose
  // parameters are all in `assigned`).
  int gain_for_param(int p, int level, const std::vector<int>& row,
                     const std::vector<char>& assigned) const {
    int g = 0;
    for (int s : by_param[p]) {
      bool ok = true;
      std::size_t r = 0;
      for (int q : subsets[s]) {
        int lvl = (q == p) ? level : row[q];
        if (q != p && !assigned[q]) {
          ok = false;
          break;
        }
        r = r * domains[q] + static_cast<std::size_t>(lvl);
      }
      if (ok && !covered[base[s] + r]) ++g;
    }
    return g;
  }

  int row_gain(const std::vector<int>& row) const {
    int g = 0;
    for (std::size_t s = 0; s < subsets.size(); ++s)
      if (!is_covered(static_cast<int>(s), row)) ++g;
    return g;
  }
};

constexpr int kCandidatesPerRow = 50;
constexpr std::size_t kRowCap = 1000000;

std::vector<int> build_candidate(const CoverageMap& cov, std::mt19937_64& rng) {
  int k = cov.k;
  std::vector<int> row(k, 0);
  std::vector<char> assigned(k, 0);

  // first parameter: most uncovered combinations; its level likewise
  std::vector<long long> param_score(k, 0);
  for (int p = 0; p < k; ++p)
    for (int l = 0; l < cov.domains[p]; ++l)
      param_score[p] += cov.level_count[p][l];
  int first = static_cast<int>(std::max_element(param_score.begin(),
                                                param_score.end()) -
                               param_score.begin());
  {
    long long best = -1;
    std::vector<int> ties;
    for (int l = 0; l < cov.domains[first]; ++l) {
      long long c = cov.level_count[first][l];
      if (c > best) {
        best = c;
        ties = {l};
      } else if (c == best) {
        ties.push_back(l);
      }
    }
    row[first] = ties[std::uniform_int_distribution<std::size_t>(
        0, ties.size() - 1)(rng)];
    assigned[first] = 1;
  }

  // remaining parameters in random order, each greedily maximizing the
  // number of newly covered combinations with the already-assigned ones
  std::vector<int> order;
  for (int p = 0; p < k; ++p)
    if (p != first) order.push_back(p);
  std::shuffle(order.begin(), order.end(), rng);
  for (int p : order) {
    int best = -1;
    std::vector<int> ties;
    for (int l = 0; l < cov.domains[p]; ++l) {
      int g = cov.gain_for_param(p, l, row, assigned);
      if (g > best) {
        best = g;
        ties = {l};
      } else if (g == best) {
        ties.push_back(l);
      }
    }
    row[p] = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(
        rng)];
    assigned[p] = 1;
  }
  return row;
}

CoveringArray exhaustive_product(const std::vector<int>& domains) {
  CoveringArray ca;
  ca.strength = static_cast<int>(domains.size());
  ca.domains = domains;
  std::vector<int> row(domains.size(), 0);
  while (true) {
    ca.rows.push_back(row);
    int i = static_cast<int>(domains.size()) - 1;
    while (i >= 0 && row[i] == domains[i] - 1) row[i--] = 0;
    if (i < 0) break;
    ++row[i];
  }
  return ca;
}

}  // namespace

unsigned long long count_t_way_combinations(int t,
                                            const std::vector<int>& domains) {
  check_args(t, domains);
  unsigned long long total = 0;
  for (const auto& s : t_subsets(static_cast<int>(domains.size()), t)) {
    unsigned long long w = 1;
    for (int p : s) w *= static_cast<unsigned long long>(domains[p]);
    total += w;
  }
  return total;
}

CoveringArray generate_covering_array(int t, const std::vector<int>& domains,
                                      std::uint64_t seed) {
  check_args(t, domains);
  for (int v : domains)
    if (v < 2) throw std::invalid_argument("domain sizes must be >= 2");
  if (t == static_cast<int>(domains.size())) return exhaustive_product(domains);

  CoveringArray ca;
  ca.strength = t;
  ca.domains = domains;
  CoverageMap cov(t, domains);

  while (cov.uncovered_total > 0) {
    if (ca.rows.size() >= kRowCap)
      throw std::logic_error("covering array row cap exceeded");
    std::vector<std::vector<int>> cand(kCandidatesPerRow);
    std::vector<int> gain(kCandidatesPerRow);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < kCandidatesPerRow; ++c) {
      std::mt19937_64 rng(derive_seed(seed, ca.rows.size() * 64 + c));
      cand[c] = build_candidate(cov, rng);
      gain[c] = cov.row_gain(cand[c]);
    }
    int best = 0;
    for (int c = 1; c < kCandidatesPerRow; ++c)
      if (gain[c] > gain[best]) best = c;
    cov.mark_row(cand[best]);
    ca.rows.push_back(std::move(cand[best]));
  }
  return ca;
}

std::vector<MissingCombination> verify_coverage(const CoveringArray& ca) {
  check_args(ca.strength, ca.domains);
  CoverageMap cov(ca.strength, ca.domains);
  for (const auto& row : ca.rows) {
    if (row.size() != ca.domains.size())
      throw std::invalid_argument("row width mismatch");
    for (std::size_t p = 0; p < row.size(); ++p)
      if (row[p] < 0 || row[p] >= ca.domains[p])
        throw std::invalid_argument("row level out of domain");
    cov.mark_row(row);
  }
  std::vector<MissingCombination> missing;
  for (std::size_t s = 0; s < cov.subsets.size(); ++s) {
    std::size_t w = 1;
    for (int p : cov.subsets[s]) w *= static_cast<std::size_t>(ca.domains[p]);
    for (std::size_t a = 0; a < w; ++a) {
      if (cov.covered[cov.base[s] + a]) continue;
      MissingCombination m;
      m.params = cov.subsets[s];
      m.levels.resize(m.params.size());
      std::size_t rem = a;
      for (int i = static_cast<int>(m.params.size()) - 1; i >= 0; --i) {
        int d = ca.domains[m.params[i]];
        m.levels[i] = static_cast<int>(rem % d);
        rem /= d;
      }
      missing.push_back(std::move(m));
    }
  }
  return missing;
}

std::string covering_array_to_csv(const CoveringArray& ca) {
  std::ostringstream os;
  for (std::size_t p = 0; p < ca.domains.size(); ++p)
    os << (p ? "," : "") << "p" << (p + 1);
  os << '\n';
  for (const auto& row : ca.rows) {
    for (std::size_t p = 0; p < row.size(); ++p) os << (p ? "," : "") << row[p];
    os << '\n';
  }
  return os.str();
}

CoveringArray covering_array_from_csv(const std::string& text, int strength) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  std::size_t k = static_cast<std::size_t>(
      std::count(line.begin(), line.end(), ',') + 1);
  CoveringArray ca;
  ca.strength = strength;
  ca.domains.assign(k, 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<int> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stoi(tok));
    if (row.size() != k) throw std::invalid_argument("ragged CSV row");
    for (std::size_t p = 0; p < k; ++p)
      ca.domains[p] = std::max(ca.domains[p], row[p] + 1);
    ca.rows.push_back(std::move(row));
  }
  return ca;
}

}  // namespace falsitav
