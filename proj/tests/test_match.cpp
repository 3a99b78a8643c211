#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "fer/error.hpp"
#include "fer/gen.hpp"
#include "fer/match.hpp"
#include "test_support.hpp"

using namespace fer;
using namespace fer::testing;

TEST_CASE("matching examples", "[match]")
{
    const auto id = SparsityPattern::identity(5);
    CHECK(max_matching(id).size == 5);
    CHECK(brute_force_matching(id) == 5);

    const SparsityPattern two(3, {{0, 0}, {0, 1}, {1, 0}, {2, 1}});
    CHECK(max_matching(two).size == 2);
    CHECK(brute_force_matching(two) == 2);

    const SparsityPattern empty(4);
    const auto r = max_matching(empty);
    CHECK(r.size == 0);
    CHECK(r.unmatched() == 4);
    CHECK(brute_force_matching(empty) == 0);

    CHECK(sprank(SparsityPattern::full(2)) == 2);
    CHECK(sprank(SparsityPattern::full(3)) == 3);
    CHECK(sprank(SparsityPattern(3, {{0, 1}, {1, 1}, {2, 1}})) == 1);

    CHECK_THROWS_AS(brute_force_matching(SparsityPattern::identity(17)), TooLarge);
    Rng rng(1);
    CHECK_THROWS_AS(brute_force_matching(random_pattern(12, 65, rng)), TooLarge);
}

TEST_CASE("matching result is consistent", "[match]")
{
    const SparsityPattern p(3, {{0, 0}, {0, 1}, {1, 0}, {2, 1}});
    const auto m = max_matching(p);
    CHECK(is_valid_matching(p, m));
    auto broken = m;
    for (auto& c : broken.row_match)
        if (c != kUnmatched) { c = (c + 1) % 3; break; }
    CHECK_FALSE(is_valid_matching(p, broken));
    CHECK(max_matching(p).row_match == m.row_match);
}

TEST_CASE("Hopcroft-Karp agrees with the exhaustive oracle", "[match][property]")
{
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(seed);
        const Index n = 1 + static_cast<Index>(rng.below(12));
        const Index nnz = static_cast<Index>(rng.below(static_cast<std::uint64_t>(std::min<Index>(40, n * n)) + 1));
        const auto p = random_pattern(n, nnz, rng);
        const auto m = max_matching(p);
        REQUIRE(is_valid_matching(p, m));
        REQUIRE(m.size == brute_force_matching(p));
    }
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed + 5000);
        const auto p = random_pattern(8, 20, rng);
        REQUIRE(sprank(p) == brute_force_matching(p));
    }
}

TEST_CASE("adding an entry never lowers sprank", "[match][property]")
{
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed);
        const Index n = 2 + static_cast<Index>(rng.below(30));
        const auto p = random_pattern(n, static_cast<Index>(rng.below(static_cast<std::uint64_t>(2 * n))), rng);
        const Index before = sprank(p);
        std::set<std::pair<Index, Index>> have;
        for (const auto& e : p.entries()) have.insert({e.row, e.col});
        std::vector<Entry> grown(p.entries().begin(), p.entries().end());
        for (int tries = 0; tries < 100; ++tries) {
            const Entry e{static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))),
                          static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))};
            if (have.insert({e.row, e.col}).second) { grown.push_back(e); break; }
        }
        const Index after = sprank(SparsityPattern(n, std::move(grown)));
        REQUIRE(after >= before);
        REQUIRE(after <= before + 1);
    }
}

TEST_CASE("sprank is permutation invariant and bounded", "[match][property]")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const Index n = 1 + static_cast<Index>(rng.below(200));
        const auto p = random_pattern(n, static_cast<Index>(rng.below(static_cast<std::uint64_t>(3 * n))), rng);
        const auto rp = random_permutation(n, rng), cp = random_permutation(n, rng);
        const Index s = sprank(p);
        REQUIRE(sprank(permuted(p, rp, cp)) == s);

        std::set<Index> rows, cols;
        for (const auto& e : p.entries()) { rows.insert(e.row); cols.insert(e.col); }
        REQUIRE(s <= static_cast<Index>(std::min(rows.size(), cols.size())));
    }
}

TEST_CASE("large instance completes", "[match]")
{
    GenSpec spec;
    spec.n = 1'000'000;
    spec.k_avg = 2;
    spec.weight_mode = WeightMode::all_ones;
    const auto p = gen_uniform(spec).pattern();
    const auto m = max_matching(p);
    CHECK(is_valid_matching(p, m));
    CHECK(m.size > 700'000);
    CHECK(m.size < 800'000);
}
