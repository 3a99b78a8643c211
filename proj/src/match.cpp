#include "fer/match.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <unordered_set>

#include "fer/error.hpp"

namespace fer {

namespace {

/// Column-major adjacency with rows ascending inside each column.
struct ColumnAdjacency {
    std::vector<Index> start;
    std::vector<Index> rows;

    explicit ColumnAdjacency(const SparsityPattern& p) {
        const auto n = static_cast<std::size_t>(p.n());
        const auto entries = p.entries();
        // Two counting-sort passes: by row, then stably by column.
        std::vector<Index> row_start(n + 1, 0);
        for (const auto& e : entries) ++row_start[static_cast<std::size_t>(e.row) + 1];
        for (std::size_t i = 0; i < n; ++i) row_start[i + 1] += row_start[i];
        std::vector<Index> by_row(entries.size());
        {
            auto fill = row_start;
            for (std::size_t i = 0; i < entries.size(); ++i)
                by_row[static_cast<std::size_t>(fill[static_cast<std::size_t>(entries[i].row)]++)] =
                    static_cast<Index>(i);
        }
        start.assign(n + 1, 0);
        for (const auto& e : entries) ++start[static_cast<std::size_t>(e.col) + 1];
        for (std::size_t j = 0; j < n; ++j) start[j + 1] += start[j];
        rows.resize(entries.size());
        auto fill = start;
        for (Index idx : by_row) {
            const auto& e = entries[static_cast<std::size_t>(idx)];
            rows[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.col)]++)] = e.row;
        }
    }
};

constexpr Index kInf = std::numeric_limits<Index>::max();

}  // namespace

MatchingResult max_matching(const SparsityPattern& p) {
    const auto n = static_cast<std::size_t>(p.n());
    const ColumnAdjacency adj(p);
    MatchingResult m;
    m.row_match.assign(n, kUnmatched);
    m.col_match.assign(n, kUnmatched);

    // Greedy start.
    for (std::size_t c = 0; c < n; ++c) {
        for (Index k = adj.start[c]; k < adj.start[c + 1]; ++k) {
            const Index r = adj.rows[static_cast<std::size_t>(k)];
            if (m.row_match[static_cast<std::size_t>(r)] == kUnmatched) {
                m.row_match[static_cast<std::size_t>(r)] = static_cast<Index>(c);
                m.col_match[c] = r;
                ++m.size;
                break;
            }
        }
    }

    std::vector<Index> dist(n);
    std::vector<Index> queue;
    queue.reserve(n);
    std::vector<Index> cursor(n);
    std::vector<Index> stack_cols;
    std::vector<Index> stack_rows;

    while (true) {
        // BFS from free columns, layered by alternating paths.
        queue.clear();
        for (std::size_t c = 0; c < n; ++c) {
            if (m.col_match[c] == kUnmatched) {
                dist[c] = 0;
                queue.push_back(static_cast<Index>(c));
            } else {
                dist[c] = kInf;
            }
        }
        Index free_layer = kInf;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto c = static_cast<std::size_t>(queue[head]);
            if (dist[c] >= free_layer) break;
            for (Index k = adj.start[c]; k < adj.start[c + 1]; ++k) {
                const Index r = adj.rows[static_cast<std::size_t>(k)];
                const Index next = m.row_match[static_cast<std::size_t>(r)];
                if (next == kUnmatched) {
                    free_layer = std::min(free_layer, dist[c]);
                } else if (dist[static_cast<std::size_t>(next)] == kInf) {
                    dist[static_cast<std::size_t>(next)] = dist[c] + 1;
                    queue.push_back(next);
                }
            }
        }
        if (free_layer == kInf) break;

        // Vertex-disjoint shortest augmenting paths, iterative DFS.
        for (std::size_t c = 0; c < n; ++c) cursor[c] = adj.start[c];
        for (std::size_t root = 0; root < n; ++root) {
            if (m.col_match[root] != kUnmatched || dist[root] != 0) continue;
            stack_cols.assign(1, static_cast<Index>(root));
            stack_rows.clear();
            bool augmented = false;
            while (!stack_cols.empty() && !augmented) {
                const auto c = static_cast<std::size_t>(stack_cols.back());
                bool advanced = false;
                while (cursor[c] < adj.start[c + 1]) {
                    const Index r = adj.rows[static_cast<std::size_t>(cursor[c]++)];
                    const Index next = m.row_match[static_cast<std::size_t>(r)];
                    if (next == kUnmatched) {
                        if (dist[c] != free_layer) continue;
                        stack_rows.push_back(r);
                        augmented = true;
                        advanced = true;
                        break;
                    }
                    if (dist[static_cast<std::size_t>(next)] == dist[c] + 1) {
                        stack_rows.push_back(r);
                        stack_cols.push_back(next);
                        advanced = true;
                        break;
                    }
                }
                if (!advanced) {
                    dist[c] = kInf;
                    stack_cols.pop_back();
                    if (!stack_rows.empty()) stack_rows.pop_back();
                }
            }
            if (augmented) {
                for (std::size_t i = 0; i < stack_cols.size(); ++i) {
                    const Index col = stack_cols[i];
                    const Index row = stack_rows[i];
                    m.col_match[static_cast<std::size_t>(col)] = row;
                    m.row_match[static_cast<std::size_t>(row)] = col;
                }
                // Used columns leave the layered graph for this phase.
                for (Index col : stack_cols) dist[static_cast<std::size_t>(col)] = kInf;
                ++m.size;
            }
        }
    }
    return m;
}

Index sprank(const SparsityPattern& p) { return max_matching(p).size; }

Index brute_force_matching(const SparsityPattern& p) {
    if (p.n() > 16 || p.nnz() > 64)
        throw TooLarge("brute_force_matching supports n <= 16 and nnz <= 64");
    const auto n = static_cast<std::size_t>(p.n());
    std::vector<std::uint32_t> col_rows(n, 0);
    for (const auto& e : p.entries()) col_rows[static_cast<std::size_t>(e.col)] |= 1u << e.row;

    // reachable[mask]: some matching of the columns seen so far covers exactly `mask`.
    std::vector<char> reachable(std::size_t{1} << n, 0);
    reachable[0] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        auto next = reachable;
        for (std::size_t mask = 0; mask < reachable.size(); ++mask) {
            if (!reachable[mask]) continue;
            std::uint32_t options = col_rows[c] & ~static_cast<std::uint32_t>(mask);
            while (options) {
                const std::uint32_t bit = options & (~options + 1);
                next[mask | bit] = 1;
                options ^= bit;
            }
        }
        reachable = std::move(next);
    }
    int best = 0;
    for (std::size_t mask = 0; mask < reachable.size(); ++mask)
        if (reachable[mask]) best = std::max(best, std::popcount(static_cast<std::uint32_t>(mask)));
    return best;
}

bool is_valid_matching(const SparsityPattern& p, const MatchingResult& m) {
    const auto n = static_cast<std::size_t>(p.n());
    if (m.row_match.size() != n || m.col_match.size() != n) return false;
    std::unordered_set<std::uint64_t> entries;
    entries.reserve(p.nnz());
    for (const auto& e : p.entries())
        entries.insert(static_cast<std::uint64_t>(e.row) * n + static_cast<std::uint64_t>(e.col));
    Index matched = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const Index c = m.row_match[r];
        if (c == kUnmatched) continue;
        if (c < 0 || static_cast<std::size_t>(c) >= n) return false;
        if (m.col_match[static_cast<std::size_t>(c)] != static_cast<Index>(r)) return false;
        if (!entries.count(static_cast<std::uint64_t>(r) * n + static_cast<std::uint64_t>(c)))
            return false;
        ++matched;
    }
    Index matched_cols = 0;
    for (std::size_t c = 0; c < n; ++c) {
        const Index r = m.col_match[c];
        if (r == kUnmatched) continue;
        if (r < 0 || static_cast<std::size_t>(r) >= n ||
            m.row_match[static_cast<std::size_t>(r)] != static_cast<Index>(c))
            return false;
        ++matched_cols;
    }
    return matched == m.size && matched_cols == m.size;
}

}  // namespace fer
