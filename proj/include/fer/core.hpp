#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fer {

using Index = std::int64_t;

/// Position of a nonzero in an N×N matrix, 0-based.
struct Entry {
    Index row = 0;
    Index col = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

struct Triplet {
    Index row = 0;
    Index col = 0;
    double value = 0.0;
};

/// Positions of the nonzeros of a square matrix (the 0/1 structural matrix).
///
/// Entries keep the order they were given in. Construction rejects
/// out-of-range indices and duplicate positions.
class SparsityPattern {
public:
    explicit SparsityPattern(Index n, std::vector<Entry> entries = {});

    static SparsityPattern identity(Index n);
    static SparsityPattern full(Index n);

    Index n() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    std::span<const Entry> entries() const noexcept { return entries_; }

    friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;

private:
    Index n_;
    std::vector<Entry> entries_;
};

enum class WeightMode { random_iid, all_ones, external };

std::string_view to_string(WeightMode mode);
WeightMode parse_weight_mode(std::string_view text);

/// The input matrix: a pattern plus one nonzero value per entry.
class WeightedSparseMatrix {
public:
    WeightedSparseMatrix(SparsityPattern pattern, std::vector<double> values, WeightMode mode);

    /// Builds from coordinate triplets. Exact zeros are dropped and counted in
    /// `dropped_zeros`; duplicate coordinates are an error.
    static WeightedSparseMatrix from_triplets(Index n, std::span<const Triplet> triplets,
                                              WeightMode mode,
                                              std::size_t* dropped_zeros = nullptr);

    const SparsityPattern& pattern() const noexcept { return pattern_; }
    std::span<const double> values() const noexcept { return values_; }
    WeightMode weight_mode() const noexcept { return mode_; }
    Index n() const noexcept { return pattern_.n(); }
    std::size_t nnz() const noexcept { return pattern_.nnz(); }

    friend bool operator==(const WeightedSparseMatrix&, const WeightedSparseMatrix&) = default;

private:
    SparsityPattern pattern_;
    std::vector<double> values_;
    WeightMode mode_;
};

enum class DegreeKind { in, out };

std::string_view to_string(DegreeKind kind);

/// Empirical or analytic degree distribution P(k) over a finite support.
///
/// Frequencies are stored densely by degree. A distribution that came from
/// integer node counts keeps them, which makes frequencies and mean exact
/// quotients count/n; reading such a distribution back from text recovers
/// the counts, so both paths produce bit-identical values.
class DegreeDistribution {
public:
    static DegreeDistribution from_counts(std::vector<Index> counts, DegreeKind kind);

    /// Frequencies indexed by degree. They must sum to 1 within 1e-9; larger
    /// deviations than 1e-12 are renormalized. When every p(k)·n is an integer
    /// the counts are recovered.
    static DegreeDistribution from_frequencies(std::vector<double> probs, Index n, DegreeKind kind);

    std::span<const double> probs() const noexcept { return probs_; }
    double prob(Index k) const noexcept {
        return k >= 0 && k < static_cast<Index>(probs_.size()) ? probs_[k] : 0.0;
    }
    Index max_degree() const noexcept { return static_cast<Index>(probs_.size()) - 1; }
    std::vector<Index> support() const;
    double mean() const noexcept { return mean_; }
    Index n() const noexcept { return n_; }
    DegreeKind kind() const noexcept { return kind_; }
    const std::optional<std::vector<Index>>& counts() const noexcept { return counts_; }

    friend bool operator==(const DegreeDistribution&, const DegreeDistribution&) = default;

private:
    DegreeDistribution() = default;

    std::vector<double> probs_;
    std::optional<std::vector<Index>> counts_;
    double mean_ = 0.0;
    Index n_ = 0;
    DegreeKind kind_ = DegreeKind::in;
};

struct DegreeSequences {
    std::vector<Index> in;   ///< nonzeros per row
    std::vector<Index> out;  ///< nonzeros per column
};

SparsityPattern structuralize(const WeightedSparseMatrix& a);

/// Entry (i, j) is the edge j→i: in-degree of i counts row i, out-degree of j counts column j.
DegreeSequences degree_sequences(const SparsityPattern& p);

DegreeDistribution degree_distribution(std::span<const Index> seq, DegreeKind kind);

struct DegreeLaws {
    DegreeDistribution in;
    DegreeDistribution out;
};

/// Same result as degree_distribution over degree_sequences, without the
/// length-n intermediate sequences.
DegreeLaws degree_laws(const SparsityPattern& p);

/// ⟨k⟩ = nnz / n.
double mean_row_degree(const SparsityPattern& p);

/// Pattern with row i moved to row_perm[i] and column j to col_perm[j].
SparsityPattern permuted(const SparsityPattern& p, std::span<const Index> row_perm,
                         std::span<const Index> col_perm);

}  // namespace fer
