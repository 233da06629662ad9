#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace falsitav {

// t-way covering array over mixed-level discrete domains. rows[r][p] is the
// 0-based level index of parameter p in test r.
struct CoveringArray {
  int strength = 0;
  std::vector<int> domains;
  std::vector<std::vector<int>> rows;
};

struct MissingCombination {
  std::vector<int> params;  // t parameter indices, ascending
  std::vector<int> levels;  // matching level indices

  std::string to_string() const;
};

// Sum over all t-subsets S of parameters of the product of |S|'s domains.
unsigned long long count_t_way_combinations(int t, const std::vector<int>& domains);

// AETG-style greedy generation: rows added one at a time, each the best of
// 50 randomized candidates. Deterministic for a fixed seed. For t == k the
// result is the exhaustive lexicographic product.
CoveringArray generate_covering_array(int t, const std::vector<int>& domains,
                                      std::uint64_t seed);

// Exhaustive enumeration of all t-subsets x level assignments; empty result
// means full coverage.
std::vector<MissingCombination> verify_coverage(const CoveringArray& ca);

// CSV with header p1,...,pk and 0-based level indices.
std::string covering_array_to_csv(const CoveringArray& ca);
CoveringArray covering_array_from_csv(const std::string& text, int strength);

}  // namespace falsitav
