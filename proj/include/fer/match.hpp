#pragma once

#include <optional>
#include <vector>

#include "fer/core.hpp"

namespace fer {

inline constexpr Index kUnmatched = -1;

struct MatchingResult {
    Index size = 0;
    std::vector<Index> row_match;  ///< matched column per row, or kUnmatched
    std::vector<Index> col_match;  ///< matched row per column, or kUnmatched

    /// Unmatched-node count n - |M*|.
    Index unmatched() const noexcept { return static_cast<Index>(row_match.size()) - size; }
};

/// Maximum bipartite matching between the columns and rows of `p`
/// (Hopcroft–Karp, one edge per entry). Deterministic: columns and their rows
/// are visited in ascending index order.
MatchingResult max_matching(const SparsityPattern& p);

/// Structural rank: size of a maximum matching.
Index sprank(const SparsityPattern& p);

/// Exhaustive oracle for n <= 16 and nnz <= 64 (dynamic programming over row
/// subsets, one column at a time). Throws TooLarge beyond those bounds.
Index brute_force_matching(const SparsityPattern& p);

/// True when `m` is a valid matching of `p`: consistent maps, every pair an entry.
bool is_valid_matching(const SparsityPattern& p, const MatchingResult& m);

}  // namespace fer
