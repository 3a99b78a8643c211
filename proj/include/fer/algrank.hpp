#pragma once

#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "fer/core.hpp"
#include "fer/error.hpp"

namespace fer {

/// 2^61 − 1.
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Arithmetic modulo a prime below 2^63, with a fast path for 2^61 − 1.
class PrimeField {
public:
    explicit PrimeField(std::uint64_t prime);

    std::uint64_t modulus() const noexcept { return p_; }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
        const std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    std::uint64_t neg(std::uint64_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept {
        const unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
        if (mersenne_) {
            std::uint64_t r = (static_cast<std::uint64_t>(t) & kMersenne61) + static_cast<std::uint64_t>(t >> 61);
            if (r >= p_) r -= p_;
            if (r >= p_) r -= p_;
            return r;
        }
        return static_cast<std::uint64_t>(t % p_);
    }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const noexcept;
    std::uint64_t inv(std::uint64_t a) const noexcept { return pow(a, p_ - 2); }

    /// Maps a signed integer into the field.
    std::uint64_t from_signed(std::int64_t v) const noexcept;

private:
    std::uint64_t p_;
    bool mersenne_;
};

/// Deterministic Miller–Rabin for 64-bit integers.
bool is_prime(std::uint64_t v);

enum class Pivoting {
    markowitz,  ///< sparse elimination, then dense once the active block fills in
    dense,      ///< dense elimination in natural column order
};

struct FieldRankOptions {
    std::uint64_t prime = kMersenne61;
    int precision_digits = 12;  ///< values are scaled by 10^digits and must land on integers
    Pivoting pivoting = Pivoting::markowitz;
    double dense_switch_density = 0.1;
};

struct FieldRankResult {
    Index rank = 0;
    std::uint64_t prime = kMersenne61;
    std::optional<std::uint64_t> weight_seed;
    Index pivot_count = 0;
};

/// Field element entry of a matrix over GF(prime).
struct FieldEntry {
    Index row = 0;
    Index col = 0;
    std::uint64_t value = 0;
};

/// Rank over GF(prime) by Gaussian elimination. Zero values are ignored.
Index eliminate_rank(Index n, std::vector<FieldEntry> entries, const PrimeField& field,
                     Pivoting pivoting = Pivoting::markowitz, double dense_switch_density = 0.1);

/// Exact rank of the matrix with values reduced into GF(prime). Throws
/// NotRepresentable when a value times 10^precision_digits is not an integer,
/// and Error unless prime is a prime in (2^40, 2^63).
FieldRankResult field_rank(const WeightedSparseMatrix& m, const FieldRankOptions& opts = {});

/// Rank of the pattern with iid uniform nonzero field weights: the generic rank
/// with failure probability at most nnz / prime.
FieldRankResult generic_rank(const SparsityPattern& p, std::uint64_t prime, std::uint64_t seed,
                             Pivoting pivoting = Pivoting::markowitz);

inline constexpr Index kNumericalRankMaxN = 4000;

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense(const WeightedSparseMatrix& m) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(m.n(), m.n());
    const auto entries = m.pattern().entries();
    const auto values = m.values();
    for (std::size_t i = 0; i < entries.size(); ++i)
        a(entries[i].row, entries[i].col) = static_cast<Scalar>(values[i]);
    return a;
}

/// Singular values of a square dense matrix (LAPACK gesdd, values only); the
/// argument is overwritten. Defined for float and double.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> singular_values(
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a);

template <>
Eigen::VectorXf singular_values<float>(Eigen::MatrixXf&);
template <>
Eigen::VectorXd singular_values<double>(Eigen::MatrixXd&);

/// Number of singular values above rel_tol·n·σ_max (rel_tol defaults to the
/// machine epsilon of Scalar). Densifies; throws TooLarge for n > 4000.
template <typename Scalar = double>
Index numerical_rank(const WeightedSparseMatrix& m,
                     std::optional<std::type_identity_t<Scalar>> rel_tol = std::nullopt) {
    if (m.n() > kNumericalRankMaxN)
        throw TooLarge("numerical_rank is limited to n <= " + std::to_string(kNumericalRankMaxN));
    if (m.nnz() == 0) return 0;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix a = to_dense<Scalar>(m);
    const auto sigma = singular_values<Scalar>(a);
    const Scalar tol = rel_tol.value_or(Eigen::NumTraits<Scalar>::epsilon());
    const Scalar threshold = tol * static_cast<Scalar>(m.n()) * sigma.maxCoeff();
    return static_cast<Index>((sigma.array() > threshold).count());
}

}  // namespace fer
