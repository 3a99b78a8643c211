#include <catch2/catch_amalgamated.hpp>

#include "fer/core.hpp"
#include "fer/error.hpp"
#include "test_support.hpp"

using namespace fer;
using fer::testing::random_pattern;
using fer::testing::random_permutation;
using fer::testing::sorted;

TEST_CASE("structuralize keeps nonzero positions", "[core]")
{
    const std::vector<Triplet> diag = {{0, 0, 2.5}, {1, 1, -1.0}, {2, 2, 7.0}};
    const auto a = WeightedSparseMatrix::from_triplets(3, diag, WeightMode::external);
    const auto p = structuralize(a);
    CHECK(p.n() == 3);
    CHECK(p == SparsityPattern(3, {{0, 0}, {1, 1}, {2, 2}}));
    CHECK(structuralize(WeightedSparseMatrix(p, {1.0, 1.0, 1.0}, WeightMode::all_ones)) == p);

    const auto empty = structuralize(WeightedSparseMatrix(SparsityPattern(4), {}, WeightMode::all_ones));
    CHECK(empty.nnz() == 0);
    CHECK(empty.n() == 4);

    const auto full = structuralize(WeightedSparseMatrix(SparsityPattern::full(2), {1, 2, 3, 4}, WeightMode::external));
    CHECK(full == SparsityPattern(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST_CASE("construction rejects malformed input", "[core]")
{
    CHECK_THROWS_AS(SparsityPattern(0), Error);
    CHECK_THROWS_AS(SparsityPattern(2, {{0, 0}, {0, 0}}), Error);
    CHECK_THROWS_AS(SparsityPattern(2, {{2, 0}}), Error);
    CHECK_THROWS_AS(SparsityPattern(2, {{0, -1}}), Error);
    CHECK_THROWS_AS(WeightedSparseMatrix(SparsityPattern(2, {{0, 0}}), {0.0}, WeightMode::external), Error);
    CHECK_THROWS_AS(WeightedSparseMatrix(SparsityPattern(2, {{0, 0}}), {}, WeightMode::external), Error);

    std::size_t dropped = 0;
    const std::vector<Triplet> t = {{0, 0, 0.0}, {1, 0, 3.0}};
    const auto m = WeightedSparseMatrix::from_triplets(2, t, WeightMode::external, &dropped);
    CHECK(dropped == 1);
    CHECK(m.nnz() == 1);
    const std::vector<Triplet> dup = {{1, 0, 1.0}, {1, 0, 2.0}};
    CHECK_THROWS_AS(WeightedSparseMatrix::from_triplets(2, dup, WeightMode::external), Error);
}

TEST_CASE("degree sequences count rows as in-degree and columns as out-degree", "[core]")
{
    auto s = degree_sequences(SparsityPattern::identity(3));
    CHECK(s.in == std::vector<Index>{1, 1, 1});
    CHECK(s.out == std::vector<Index>{1, 1, 1});

    s = degree_sequences(SparsityPattern(3, {{0, 0}, {0, 1}, {1, 0}, {2, 0}}));
    CHECK(s.in == std::vector<Index>{2, 1, 1});
    CHECK(s.out == std::vector<Index>{3, 1, 0});

    s = degree_sequences(SparsityPattern(2));
    CHECK(s.in == std::vector<Index>{0, 0});
    CHECK(s.out == std::vector<Index>{0, 0});
}

TEST_CASE("degree distribution is the relative frequency of each degree", "[core]")
{
    const std::vector<Index> in = {2, 1, 1};
    auto d = degree_distribution(in, DegreeKind::in);
    CHECK(d.prob(1) == 2.0 / 3.0);
    CHECK(d.prob(2) == 1.0 / 3.0);
    CHECK(d.prob(0) == 0.0);
    CHECK(d.support() == std::vector<Index>{1, 2});

    d = degree_distribution(std::vector<Index>(5, 0), DegreeKind::out);
    CHECK(d.prob(0) == 1.0);
    CHECK(d.mean() == 0.0);

    d = degree_distribution(std::vector<Index>(17, 1), DegreeKind::in);
    CHECK(d.prob(1) == 1.0);
    CHECK(d.mean() == 1.0);

    CHECK_THROWS_AS(degree_distribution(std::vector<Index>{}, DegreeKind::in), Error);
}

TEST_CASE("mean row degree", "[core]")
{
    std::vector<Entry> e;
    for (Index i = 0; i < 3000; ++i) {
        e.push_back({i, i});
        e.push_back({i, (i + 1) % 3000});
    }
    CHECK(mean_row_degree(SparsityPattern(3000, e)) == 2.0);
    CHECK(mean_row_degree(SparsityPattern(9)) == 0.0);
    CHECK(mean_row_degree(SparsityPattern::identity(7)) == 1.0);
}

TEST_CASE("frequencies with integer node counts recover exact quotients", "[core]")
{
    const std::vector<Index> seq = {0, 3, 3, 1, 7, 1, 1};
    const auto d = degree_distribution(seq, DegreeKind::out);
    const std::vector<double> probs(d.probs().begin(), d.probs().end());
    const auto back = DegreeDistribution::from_frequencies(probs, d.n(), DegreeKind::out);
    CHECK(back == d);
    CHECK(back.mean() == 16.0 / 7.0);

    const auto analytic = DegreeDistribution::from_frequencies({0.0, 0.3, 0.7}, 10'000'019, DegreeKind::in);
    CHECK_FALSE(analytic.counts().has_value());
    CHECK(analytic.mean() == Catch::Approx(1.7));

    CHECK_THROWS_AS(DegreeDistribution::from_frequencies({0.5, 0.3}, 10, DegreeKind::in), Error);
    CHECK_THROWS_AS(DegreeDistribution::from_frequencies({}, 10, DegreeKind::in), Error);
    CHECK_THROWS_AS(DegreeDistribution::from_frequencies({1.0}, 0, DegreeKind::in), Error);
}

TEST_CASE("degree multisets are invariant under row and column permutations", "[core][property]")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const Index n = 1 + static_cast<Index>(rng.below(30));
        const auto p = random_pattern(n, static_cast<Index>(rng.below(static_cast<std::uint64_t>(n * n) + 1)), rng);
        const auto q = permuted(p, random_permutation(n, rng), random_permutation(n, rng));
        const auto sp = degree_sequences(p), sq = degree_sequences(q);
        CHECK(sorted(sp.in) == sorted(sq.in));
        CHECK(sorted(sp.out) == sorted(sq.out));
        CHECK(degree_distribution(sp.in, DegreeKind::in) == degree_distribution(sq.in, DegreeKind::in));
        CHECK(degree_distribution(sp.out, DegreeKind::out) == degree_distribution(sq.out, DegreeKind::out));
    }
}

TEST_CASE("in and out mean degrees both equal nnz/n", "[core][property]")
{
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        Rng rng(seed);
        const Index n = 1 + static_cast<Index>(rng.below(40));
        const auto p = random_pattern(n, static_cast<Index>(rng.below(static_cast<std::uint64_t>(3 * n) + 1)), rng);
        const auto s = degree_sequences(p);
        const auto din = degree_distribution(s.in, DegreeKind::in);
        const auto dout = degree_distribution(s.out, DegreeKind::out);
        CHECK(din.mean() == mean_row_degree(p));
        CHECK(dout.mean() == mean_row_degree(p));
        double manual = 0.0, total = 0.0;
        for (Index k = 0; k <= din.max_degree(); ++k) {
            manual += static_cast<double>(k) * din.prob(k);
            total += din.prob(k);
        }
        CHECK(manual == Catch::Approx(mean_row_degree(p)).epsilon(1e-12));
        CHECK(std::abs(total - 1.0) <= 1e-12);
        const auto w = WeightedSparseMatrix(p, std::vector<double>(p.nnz(), 1.0), WeightMode::all_ones);
        CHECK(structuralize(WeightedSparseMatrix(structuralize(w), std::vector<double>(p.nnz(), 1.0),
                                                 WeightMode::all_ones)) == structuralize(w));
    }
}

TEST_CASE("degree_laws matches the sequence path", "[core][property]")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const Index n = 1 + static_cast<Index>(rng.below(300));
        const auto p = random_pattern(n, static_cast<Index>(rng.below(static_cast<std::uint64_t>(n * n) + 1)), rng);
        const auto seq = degree_sequences(p);
        const auto laws = degree_laws(p);
        REQUIRE(laws.in == degree_distribution(seq.in, DegreeKind::in));
        REQUIRE(laws.out == degree_distribution(seq.out, DegreeKind::out));
    }
    // columns with 300 and 70000 entries overflow the narrow counters
    for (Index n : {300, 70000}) {
        std::vector<Entry> e;
        for (Index i = 0; i < n; ++i) e.push_back({i, 0});
        const SparsityPattern p(n, std::move(e));
        const auto laws = degree_laws(p);
        CHECK(laws.out.max_degree() == n);
        CHECK((*laws.out.counts())[0] == n - 1);
        CHECK((*laws.in.counts())[1] == n);
        const auto seq = degree_sequences(p);
        CHECK(laws.out == degree_distribution(seq.out, DegreeKind::out));
    }
}
