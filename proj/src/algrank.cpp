#include "fer/algrank.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

#include <lapacke.h>

#include "fer/rng.hpp"

namespace fer {

PrimeField::PrimeField(std::uint64_t prime) : p_(prime), mersenne_(prime == kMersenne61) {
    if (prime < 3 || prime >= (std::uint64_t{1} << 63)) throw Error("field modulus out of range");
}

std::uint64_t PrimeField::pow(std::uint64_t a, std::uint64_t e) const noexcept {
    std::uint64_t result = 1 % p_;
    a %= p_;
    while (e) {
        if (e & 1) result = mul(result, a);
        a = mul(a, a);
        e >>= 1;
    }
    return result;
}

std::uint64_t PrimeField::from_signed(std::int64_t v) const noexcept {
    const auto mag = static_cast<std::uint64_t>(v < 0 ? -(v + 1) : v) + (v < 0 ? 1 : 0);
    const std::uint64_t r = mag % p_;
    return v < 0 ? neg(r) : r;
}

bool is_prime(std::uint64_t v) {
    if (v < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (v % q == 0) return v == q;
    }
    auto mulmod = [v](std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % v);
    };
    auto powmod = [&](std::uint64_t a, std::uint64_t e) {
        std::uint64_t r = 1;
        while (e) {
            if (e & 1) r = mulmod(r, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return r;
    };
    std::uint64_t d = v - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d);
        if (x == 1 || x == v - 1) continue;
        bool composite = true;
        for (int i = 1; i < s && composite; ++i) {
            x = mulmod(x, x);
            composite = x != v - 1;
        }
        if (composite) return false;
    }
    return true;
}

namespace {

/// Row-major dense elimination; returns the rank.
Index dense_rank(std::vector<std::uint64_t>& a, std::size_t rows, std::size_t cols,
                 const PrimeField& field) {
    std::vector<std::uint64_t*> row(rows);
    for (std::size_t i = 0; i < rows; ++i) row[i] = a.data() + i * cols;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && row[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(row[piv], row[rank]);
        const std::uint64_t* prow = row[rank];
        const std::uint64_t inv = field.inv(prow[c]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            std::uint64_t* r = row[i];
            if (r[c] == 0) continue;
            const std::uint64_t f = field.mul(r[c], inv);
            r[c] = 0;
            for (std::size_t j = c + 1; j < cols; ++j)
                if (prow[j]) r[j] = field.sub(r[j], field.mul(f, prow[j]));
        }
        ++rank;
    }
    return static_cast<Index>(rank);
}

struct Term {
    Index col;
    std::uint64_t val;
};

class SparseEliminator {
public:
    SparseEliminator(Index n, std::vector<FieldEntry>& entries, const PrimeField& field,
                     double dense_switch_density)
        : n_(static_cast<std::size_t>(n)), field_(field), density_(dense_switch_density),
          rows_(n_), col_count_(n_, 0), col_rows_(n_), col_done_(n_, 0), stamp_(n_, 0) {
        for (const auto& e : entries) {
            if (e.value == 0) continue;
            rows_[static_cast<std::size_t>(e.row)].push_back({e.col, e.value});
        }
        for (std::size_t r = 0; r < n_; ++r) {
            auto& row = rows_[r];
            std::sort(row.begin(), row.end(), [](const Term& a, const Term& b) { return a.col < b.col; });
            if (!row.empty()) ++live_rows_;
            for (const auto& t : row) {
                col_rows_[static_cast<std::size_t>(t.col)].push_back(static_cast<Index>(r));
                increment(t.col);
            }
        }
        for (std::size_t c = 0; c < n_; ++c) heap_.push({col_count_[c], static_cast<Index>(c)});
    }

    Index run() {
        Index rank = 0;
        while (!heap_.empty()) {
            const auto [count, c] = heap_.top();
            heap_.pop();
            const auto uc = static_cast<std::size_t>(c);
            if (col_done_[uc] || count != col_count_[uc]) continue;
            if (count == 0) {
                col_done_[uc] = 1;
                continue;
            }
            if (should_densify()) return rank + densify();
            pivot_on(c);
            ++rank;
        }
        return rank;
    }

private:
    void increment(Index c) {
        if (col_count_[static_cast<std::size_t>(c)]++ == 0) ++live_cols_;
        ++active_nnz_;
    }
    void decrement(Index c) {
        if (--col_count_[static_cast<std::size_t>(c)] == 0) --live_cols_;
        --active_nnz_;
    }

    bool should_densify() const {
        const double cells = static_cast<double>(live_rows_) * static_cast<double>(live_cols_);
        return cells <= 64e6 && static_cast<double>(active_nnz_) > density_ * cells;
    }

    const Term* find(std::size_t r, Index c) const {
        const auto& row = rows_[r];
        auto it = std::lower_bound(row.begin(), row.end(), c,
                                   [](const Term& t, Index col) { return t.col < col; });
        return it != row.end() && it->col == c ? &*it : nullptr;
    }

    void pivot_on(Index c) {
        const auto uc = static_cast<std::size_t>(c);
        // Compact the candidate list: live rows that still hold column c, once each.
        ++epoch_;
        auto& cand = col_rows_[uc];
        std::size_t keep = 0;
        for (Index r : cand) {
            const auto ur = static_cast<std::size_t>(r);
            if (stamp_[ur] == epoch_ || !find(ur, c)) continue;
            stamp_[ur] = epoch_;
            cand[keep++] = r;
        }
        cand.resize(keep);

        // Markowitz restricted to the sparsest column: shortest row, lowest index.
        Index pivot = cand.front();
        for (Index r : cand) {
            const auto sr = rows_[static_cast<std::size_t>(r)].size();
            const auto sp = rows_[static_cast<std::size_t>(pivot)].size();
            if (sr < sp || (sr == sp && r < pivot)) pivot = r;
        }
        const auto up = static_cast<std::size_t>(pivot);
        const std::vector<Term> prow = std::move(rows_[up]);
        rows_[up].clear();
        const std::uint64_t inv = field_.inv(find_value(prow, c));

        touched_.clear();
        for (Index r : cand) {
            if (r == pivot) continue;
            eliminate_row(static_cast<std::size_t>(r), prow, field_.mul(find(static_cast<std::size_t>(r), c)->val, inv));
        }
        for (const auto& t : prow) {
            decrement(t.col);
            touched_.push_back(t.col);
        }
        --live_rows_;
        col_done_[uc] = 1;
        cand.clear();
        for (Index col : touched_) {
            const auto ucol = static_cast<std::size_t>(col);
            if (!col_done_[ucol]) heap_.push({col_count_[ucol], col});
        }
    }

    static std::uint64_t find_value(const std::vector<Term>& row, Index c) {
        auto it = std::lower_bound(row.begin(), row.end(), c,
                                   [](const Term& t, Index col) { return t.col < col; });
        return it->val;
    }

    /// row_r ← row_r − f·pivot_row
    void eliminate_row(std::size_t r, const std::vector<Term>& prow, std::uint64_t f) {
        auto& row = rows_[r];
        scratch_.clear();
        std::size_t i = 0, j = 0;
        while (i < row.size() || j < prow.size()) {
            if (j == prow.size() || (i < row.size() && row[i].col < prow[j].col)) {
                scratch_.push_back(row[i++]);
            } else if (i == row.size() || prow[j].col < row[i].col) {
                const Index col = prow[j].col;
                scratch_.push_back({col, field_.neg(field_.mul(f, prow[j++].val))});
                increment(col);
                col_rows_[static_cast<std::size_t>(col)].push_back(static_cast<Index>(r));
                touched_.push_back(col);
            } else {
                const Index col = row[i].col;
                const std::uint64_t v = field_.sub(row[i++].val, field_.mul(f, prow[j++].val));
                if (v == 0) {
                    decrement(col);
                    touched_.push_back(col);
                } else {
                    scratch_.push_back({col, v});
                }
            }
        }
        row.swap(scratch_);
        if (row.empty()) --live_rows_;
    }

    Index densify() {
        std::vector<std::size_t> live_rows, col_index(n_, n_);
        std::size_t cols = 0;
        for (std::size_t c = 0; c < n_; ++c)
            if (!col_done_[c] && col_count_[c] > 0) col_index[c] = cols++;
        for (std::size_t r = 0; r < n_; ++r)
            if (!rows_[r].empty()) live_rows.push_back(r);
        std::vector<std::uint64_t> a(live_rows.size() * cols, 0);
        for (std::size_t i = 0; i < live_rows.size(); ++i)
            for (const auto& t : rows_[live_rows[i]])
                a[i * cols + col_index[static_cast<std::size_t>(t.col)]] = t.val;
        return dense_rank(a, live_rows.size(), cols, field_);
    }

    using HeapItem = std::pair<Index, Index>;

    std::size_t n_;
    const PrimeField& field_;
    double density_;
    std::vector<std::vector<Term>> rows_;
    std::vector<Index> col_count_;
    std::vector<std::vector<Index>> col_rows_;
    std::vector<char> col_done_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t epoch_ = 0;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
    std::vector<Term> scratch_;
    std::vector<Index> touched_;
    std::size_t live_rows_ = 0;
    std::size_t live_cols_ = 0;
    std::size_t active_nnz_ = 0;
};

void check_prime(std::uint64_t prime) {
    if (prime <= (std::uint64_t{1} << 40) || prime >= (std::uint64_t{1} << 63) || !is_prime(prime))
        throw Error("field modulus must be a prime in (2^40, 2^63), got " + std::to_string(prime));
}

std::uint64_t to_field(double v, int digits, const PrimeField& field) {
    const double scaled = v * std::pow(10.0, digits);
    const double rounded = std::nearbyint(scaled);
    const double spacing = std::nextafter(std::abs(scaled), INFINITY) - std::abs(scaled);
    if (!std::isfinite(scaled) || std::abs(rounded) > 0x1.0p62 ||
        std::abs(scaled - rounded) > std::max(1e-6, 8.0 * spacing) || rounded == 0.0)
        throw NotRepresentable("value " + std::to_string(v) + " is not an integer multiple of 1e-" +
                               std::to_string(digits));
    const std::uint64_t x = field.from_signed(static_cast<std::int64_t>(rounded));
    if (x == 0) throw NotRepresentable("value vanishes modulo the field prime");
    return x;
}

}  // namespace

Index eliminate_rank(Index n, std::vector<FieldEntry> entries, const PrimeField& field,
                     Pivoting pivoting, double dense_switch_density) {
    if (pivoting == Pivoting::dense) {
        const auto un = static_cast<std::size_t>(n);
        if (n > kNumericalRankMaxN) throw TooLarge("dense elimination limited to n <= 4000");
        std::vector<std::uint64_t> a(un * un, 0);
        for (const auto& e : entries)
            a[static_cast<std::size_t>(e.row) * un + static_cast<std::size_t>(e.col)] = e.value;
        return dense_rank(a, un, un, field);
    }
    return SparseEliminator(n, entries, field, dense_switch_density).run();
}

FieldRankResult field_rank(const WeightedSparseMatrix& m, const FieldRankOptions& opts) {
    check_prime(opts.prime);
    if (opts.precision_digits < 0 || opts.precision_digits > 18)
        throw Error("precision_digits must lie in [0, 18]");
    const PrimeField field(opts.prime);
    const auto entries = m.pattern().entries();
    const auto values = m.values();
    std::vector<FieldEntry> fe;
    fe.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        fe.push_back({entries[i].row, entries[i].col, to_field(values[i], opts.precision_digits, field)});
    FieldRankResult res;
    res.prime = opts.prime;
    res.rank = eliminate_rank(m.n(), std::move(fe), field, opts.pivoting, opts.dense_switch_density);
    res.pivot_count = res.rank;
    return res;
}

FieldRankResult generic_rank(const SparsityPattern& p, std::uint64_t prime, std::uint64_t seed,
                             Pivoting pivoting) {
    check_prime(prime);
    const PrimeField field(prime);
    Rng rng(seed);
    std::vector<FieldEntry> fe;
    fe.reserve(p.nnz());
    for (const auto& e : p.entries()) fe.push_back({e.row, e.col, rng.between(1, prime - 1)});
    FieldRankResult res;
    res.prime = prime;
    res.weight_seed = seed;
    res.rank = eliminate_rank(p.n(), std::move(fe), field, pivoting);
    res.pivot_count = res.rank;
    return res;
}

template <>
Eigen::VectorXd singular_values<double>(Eigen::MatrixXd& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::VectorXd s(n);
    if (n == 0) return s;
    const lapack_int info =
        LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw Error("singular value decomposition failed (info " + std::to_string(info) + ")");
    return s;
}

template <>
Eigen::VectorXf singular_values<float>(Eigen::MatrixXf& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::VectorXf s(n);
    if (n == 0) return s;
    const lapack_int info =
        LAPACKE_sgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw Error("singular value decomposition failed (info " + std::to_string(info) + ")");
    return s;
}

}  // namespace fer
