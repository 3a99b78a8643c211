#include "fer/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fer/error.hpp"

namespace fer {

namespace {

std::uint64_t linear_key(const Entry& e, Index n) {
    return static_cast<std::uint64_t>(e.row) * static_cast<std::uint64_t>(n) +
           static_cast<std::uint64_t>(e.col);
}

}  // namespace

SparsityPattern::SparsityPattern(Index n, std::vector<Entry> entries)
    : n_(n), entries_(std::move(entries)) {
    if (n_ < 1) throw Error("matrix dimension must be positive, got " + std::to_string(n_));
    if (n_ > (Index{1} << 31)) throw Error("matrix dimension too large");
    std::vector<std::uint64_t> keys;
    keys.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (e.row < 0 || e.row >= n_ || e.col < 0 || e.col >= n_) {
            throw Error("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                        ") out of range for n=" + std::to_string(n_));
        }
        keys.push_back(linear_key(e, n_));
    }
    std::sort(keys.begin(), keys.end());
    auto dup = std::adjacent_find(keys.begin(), keys.end());
    if (dup != keys.end()) {
        const auto u = static_cast<std::uint64_t>(n_);
        throw Error("duplicate entry (" + std::to_string(*dup / u) + ", " +
                    std::to_string(*dup % u) + ")");
    }
}

SparsityPattern SparsityPattern::identity(Index n) {
    std::vector<Entry> e;
    e.reserve(static_cast<std::size_t>(std::max<Index>(n, 0)));
    for (Index i = 0; i < n; ++i) e.push_back({i, i});
    return SparsityPattern(n, std::move(e));
}

SparsityPattern SparsityPattern::full(Index n) {
    std::vector<Entry> e;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) e.push_back({i, j});
    return SparsityPattern(n, std::move(e));
}

std::string_view to_string(WeightMode mode) {
    switch (mode) {
        case WeightMode::random_iid: return "random-iid";
        case WeightMode::all_ones: return "all-ones";
        case WeightMode::external: return "external";
    }
    return "external";
}

WeightMode parse_weight_mode(std::string_view text) {
    if (text == "random-iid") return WeightMode::random_iid;
    if (text == "all-ones") return WeightMode::all_ones;
    if (text == "external") return WeightMode::external;
    throw Error("unknown weight mode '" + std::string(text) + "'");
}

std::string_view to_string(DegreeKind kind) { return kind == DegreeKind::in ? "in" : "out"; }

WeightedSparseMatrix::WeightedSparseMatrix(SparsityPattern pattern, std::vector<double> values,
                                           WeightMode mode)
    : pattern_(std::move(pattern)), values_(std::move(values)), mode_(mode) {
    if (values_.size() != pattern_.nnz())
        throw Error("value count " + std::to_string(values_.size()) + " does not match nnz " +
                    std::to_string(pattern_.nnz()));
    for (double v : values_) {
        if (v == 0.0 || !std::isfinite(v)) throw Error("matrix values must be finite and nonzero");
    }
}

WeightedSparseMatrix WeightedSparseMatrix::from_triplets(Index n, std::span<const Triplet> triplets,
                                                         WeightMode mode,
                                                         std::size_t* dropped_zeros) {
    std::vector<Entry> entries;
    std::vector<double> values;
    entries.reserve(triplets.size());
    values.reserve(triplets.size());
    std::size_t dropped = 0;
    for (const auto& t : triplets) {
        if (t.value == 0.0) {
            ++dropped;
            continue;
        }
        entries.push_back({t.row, t.col});
        values.push_back(t.value);
    }
    if (dropped_zeros) *dropped_zeros = dropped;
    return WeightedSparseMatrix(SparsityPattern(n, std::move(entries)), std::move(values), mode);
}

DegreeDistribution DegreeDistribution::from_counts(std::vector<Index> counts, DegreeKind kind) {
    while (!counts.empty() && counts.back() == 0) counts.pop_back();
    Index n = 0;
    Index weighted = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 0) throw Error("negative degree count");
        n += counts[k];
        weighted += counts[k] * static_cast<Index>(k);
    }
    if (n == 0) throw Error("degree distribution needs at least one node");
    if (!counts.empty() && static_cast<Index>(counts.size()) - 1 > n)
        throw Error("maximum degree exceeds node count");

    DegreeDistribution d;
    d.n_ = n;
    d.kind_ = kind;
    d.probs_.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k)
        d.probs_[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
    d.mean_ = static_cast<double>(weighted) / static_cast<double>(n);
    d.counts_ = std::move(counts);
    return d;
}

DegreeDistribution DegreeDistribution::from_frequencies(std::vector<double> probs, Index n,
                                                        DegreeKind kind) {
    if (n < 1) throw Error("degree distribution node count must be positive");
    while (!probs.empty() && probs.back() == 0.0) probs.pop_back();
    if (probs.empty()) throw Error("degree distribution has empty support");
    if (static_cast<Index>(probs.size()) - 1 > n) throw Error("maximum degree exceeds node count");

    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error("frequency outside [0,1]");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw Error("frequencies of '" + std::string(to_string(kind)) + "' sum to " +
                    std::to_string(total) + ", expected 1");

    std::vector<Index> counts(probs.size());
    Index count_total = 0;
    bool integral = true;
    for (std::size_t k = 0; k < probs.size() && integral; ++k) {
        const double scaled = probs[k] * static_cast<double>(n);
        const double rounded = std::round(scaled);
        integral = std::abs(scaled - rounded) <= 1e-6;
        counts[k] = static_cast<Index>(rounded);
        count_total += counts[k];
    }
    if (integral && count_total == n) return from_counts(std::move(counts), kind);

    if (std::abs(total - 1.0) > 1e-12)
        for (double& p : probs) p /= total;

    DegreeDistribution d;
    d.n_ = n;
    d.kind_ = kind;
    d.probs_ = std::move(probs);
    double mean = 0.0;
    for (std::size_t k = 0; k < d.probs_.size(); ++k) mean += static_cast<double>(k) * d.probs_[k];
    d.mean_ = mean;
    return d;
}

std::vector<Index> DegreeDistribution::support() const {
    std::vector<Index> s;
    for (std::size_t k = 0; k < probs_.size(); ++k)
        if (probs_[k] > 0.0) s.push_back(static_cast<Index>(k));
    return s;
}

SparsityPattern structuralize(const WeightedSparseMatrix& a) { return a.pattern(); }

DegreeSequences degree_sequences(const SparsityPattern& p) {
    DegreeSequences s;
    const auto n = static_cast<std::size_t>(p.n());
    s.in.assign(n, 0);
    s.out.assign(n, 0);
    for (const auto& e : p.entries()) {
        ++s.in[static_cast<std::size_t>(e.row)];
        ++s.out[static_cast<std::size_t>(e.col)];
    }
    return s;
}

DegreeDistribution degree_distribution(std::span<const Index> seq, DegreeKind kind) {
    if (seq.empty()) throw Error("degree sequence is empty");
    const Index max_degree = *std::max_element(seq.begin(), seq.end());
    std::vector<Index> counts(static_cast<std::size_t>(max_degree) + 1, 0);
    for (Index k : seq) {
        if (k < 0) throw Error("negative degree in sequence");
        ++counts[static_cast<std::size_t>(k)];
    }
    return DegreeDistribution::from_counts(std::move(counts), kind);
}

namespace {

template <typename Counter>
std::vector<Index> histogram(const std::vector<Counter>& counts) {
    std::vector<Index> hist(1, 0);
    for (Counter c : counts) {
        if (c >= hist.size()) hist.resize(static_cast<std::size_t>(c) + 1, 0);
        ++hist[c];
    }
    return hist;
}

// False when a counter wrapped; the caller retries with a wider type.
template <typename Counter>
bool count_degrees(const SparsityPattern& p, std::vector<Index>& in_hist, std::vector<Index>& out_hist) {
    const auto n = static_cast<std::size_t>(p.n());
    std::vector<Counter> rows(n, 0), cols(n, 0);
    bool wrapped = false;
    for (const auto& e : p.entries()) {
        wrapped |= ++rows[static_cast<std::size_t>(e.row)] == 0;
        wrapped |= ++cols[static_cast<std::size_t>(e.col)] == 0;
    }
    if (wrapped) return false;
    in_hist = histogram(rows);
    out_hist = histogram(cols);
    return true;
}

}  // namespace

DegreeLaws degree_laws(const SparsityPattern& p) {
    // narrow counters keep the column scatter in cache
    std::vector<Index> in_hist, out_hist;
    if (!count_degrees<std::uint8_t>(p, in_hist, out_hist) &&
        !count_degrees<std::uint16_t>(p, in_hist, out_hist))
        count_degrees<std::uint32_t>(p, in_hist, out_hist);
    return {DegreeDistribution::from_counts(std::move(in_hist), DegreeKind::in),
            DegreeDistribution::from_counts(std::move(out_hist), DegreeKind::out)};
}

double mean_row_degree(const SparsityPattern& p) {
    return static_cast<double>(p.nnz()) / static_cast<double>(p.n());
}

SparsityPattern permuted(const SparsityPattern& p, std::span<const Index> row_perm,
                         std::span<const Index> col_perm) {
    if (static_cast<Index>(row_perm.size()) != p.n() || static_cast<Index>(col_perm.size()) != p.n())
        throw Error("permutation length does not match n");
    std::vector<Entry> e;
    e.reserve(p.nnz());
    for (const auto& x : p.entries())
        e.push_back({row_perm[static_cast<std::size_t>(x.row)],
                     col_perm[static_cast<std::size_t>(x.col)]});
    return SparsityPattern(p.n(), std::move(e));
}

}  // namespace fer
