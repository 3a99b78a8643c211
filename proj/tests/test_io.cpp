#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "fer/error.hpp"
#include "fer/gen.hpp"
#include "fer/io.hpp"
#include "test_support.hpp"

using namespace fer;
using namespace fer::testing;
using io::MatrixFileFormat;

namespace {

constexpr const char* kExample =
    "%%MatrixMarket matrix coordinate real general\n"
    "% a comment\n"
    "3 3 2\n"
    "1 1 5.0\n"
    "2 3 -1.0\n";

std::size_t parse_error_line(const std::filesystem::path& p, MatrixFileFormat f) {
    try {
        io::read_matrix(p, f);
    } catch (const ParseError& e) {
        return e.line();
    }
    return std::numeric_limits<std::size_t>::max();
}

}  // namespace

TEST_CASE("reads a coordinate real file", "[io]")
{
    TempDir dir("io");
    write_text(dir / "a.mtx", kExample);
    const auto res = io::read_matrix(dir / "a.mtx", MatrixFileFormat::matrix_market_real);
    CHECK(res.matrix.n() == 3);
    CHECK(res.matrix.pattern() == SparsityPattern(3, {{0, 0}, {1, 2}}));
    CHECK(std::vector<double>(res.matrix.values().begin(), res.matrix.values().end()) ==
          std::vector<double>{5.0, -1.0});
    CHECK(res.matrix.weight_mode() == WeightMode::external);
    CHECK(res.dropped_zeros == 0);
    CHECK(io::detect_format(dir / "a.mtx") == MatrixFileFormat::matrix_market_real);
}

TEST_CASE("reports malformed Matrix Market input with line numbers", "[io]")
{
    TempDir dir("io");
    const auto p = dir / "bad.mtx";
    const auto real = MatrixFileFormat::matrix_market_real;

    write_text(p, "%%MatrixMarket matrix coordinate real general\n3 4 1\n1 1 1\n");
    CHECK(parse_error_line(p, real) == 2);

    write_text(p, "%%MatrixMarket matrix array real general\n");
    CHECK(parse_error_line(p, real) == 1);

    write_text(p, "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1\n");
    CHECK(parse_error_line(p, real) == 1);

    write_text(p, "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
    CHECK(parse_error_line(p, real) == 3);

    write_text(p, "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n% c\n1 1 2\n");
    CHECK(parse_error_line(p, real) == 5);

    write_text(p, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n");
    CHECK(parse_error_line(p, real) == 3);

    // Decimal comma is not a number regardless of locale.
    write_text(p, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1,5\n");
    CHECK(parse_error_line(p, real) == 3);

    write_text(p, "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n");
    CHECK(parse_error_line(p, real) == 3);

    write_text(p, "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n");
    CHECK(parse_error_line(p, real) == 1);
}

TEST_CASE("explicit zeros are dropped and counted", "[io]")
{
    TempDir dir("io");
    write_text(dir / "z.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 0.0\n");
    const auto res = io::read_matrix(dir / "z.mtx");
    CHECK(res.matrix.nnz() == 0);
    CHECK(res.dropped_zeros == 1);
}

TEST_CASE("writes round-trip and empty files", "[io]")
{
    TempDir dir("io");
    write_text(dir / "a.mtx", kExample);
    const auto m = io::read_matrix(dir / "a.mtx").matrix;
    io::write_matrix(m, dir / "b.mtx", MatrixFileFormat::matrix_market_real);
    CHECK(io::read_matrix(dir / "b.mtx").matrix == m);

    const WeightedSparseMatrix empty(SparsityPattern(5), {}, WeightMode::all_ones);
    io::write_matrix(empty, dir / "e.mtx", MatrixFileFormat::matrix_market_pattern);
    const auto lines = lines_of(read_text(dir / "e.mtx"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[1] == "5 5 0");
    CHECK(io::read_matrix(dir / "e.mtx").matrix == empty);

    const WeightedSparseMatrix ones(SparsityPattern::full(2), {1, 1, 1, 1}, WeightMode::all_ones);
    io::write_matrix(ones, dir / "o.mtx", MatrixFileFormat::matrix_market_pattern);
    const auto olines = lines_of(read_text(dir / "o.mtx"));
    REQUIRE(olines.size() == 6);
    for (std::size_t i = 2; i < olines.size(); ++i) CHECK(split_count(olines[i]) == 2);
}

TEST_CASE("edge lists map src dst to entry (dst, src)", "[io]")
{
    TempDir dir("io");
    write_text(dir / "g.el", "# n=3\n0 1\n# note\n2 2\n\n");
    const auto m = io::read_matrix(dir / "g.el").matrix;
    CHECK(m.pattern() == SparsityPattern(3, {{1, 0}, {2, 2}}));
    CHECK(m.weight_mode() == WeightMode::all_ones);

    write_text(dir / "h.el", "0 1\n");
    CHECK_THROWS_AS(io::read_matrix(dir / "h.el"), ParseError);
    write_text(dir / "h.el", "# n=2\n0 2\n");
    CHECK_THROWS_AS(io::read_matrix(dir / "h.el"), ParseError);
}

TEST_CASE("every format round-trips random matrices exactly", "[io][property]")
{
    TempDir dir("io");
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        GenSpec spec;
        spec.n = 1 + static_cast<Index>(rng.below(60));
        spec.k_avg = std::min<double>(static_cast<double>(spec.n), 0.5 + 3.0 * rng.unit());
        spec.seed = seed;
        spec.weight_mode = WeightMode::random_iid;
        const auto real = gen_uniform(spec);
        io::write_matrix(real, dir / "r.mtx", MatrixFileFormat::matrix_market_real);
        CHECK(io::read_matrix(dir / "r.mtx").matrix == real);

        spec.weight_mode = WeightMode::all_ones;
        const auto ones = gen_uniform(spec);
        io::write_matrix(ones, dir / "p.mtx", MatrixFileFormat::matrix_market_pattern);
        CHECK(io::read_matrix(dir / "p.mtx").matrix == ones);
        io::write_matrix(ones, dir / "e.el", MatrixFileFormat::edge_list);
        CHECK(io::read_matrix(dir / "e.el").matrix == ones);
    }
}

TEST_CASE("degree-distribution CSV", "[io]")
{
    TempDir dir("io");
    write_text(dir / "d.csv", "# n=1000\nkind,degree,frequency\nin,1,0.5\nin,3,0.5\nout,2,1.0\n");
    const auto d = io::read_degdist(dir / "d.csv");
    CHECK(d.n == 1000);
    CHECK(d.p_in.mean() == 2.0);
    CHECK(d.p_out.mean() == 2.0);

    write_text(dir / "bad.csv", "# n=1000\nin,1,0.5\nin,3,0.3\nout,2,1.0\n");
    CHECK_THROWS_AS(io::read_degdist(dir / "bad.csv"), ParseError);
    write_text(dir / "bad.csv", "# n=0\nin,1,1.0\nout,1,1.0\n");
    CHECK_THROWS_AS(io::read_degdist(dir / "bad.csv"), ParseError);
    write_text(dir / "bad.csv", "in,1,1.0\nout,1,1.0\n");
    CHECK_THROWS_AS(io::read_degdist(dir / "bad.csv"), ParseError);
    write_text(dir / "bad.csv", "# n=4\nin,-1,1.0\nout,1,1.0\n");
    CHECK_THROWS_AS(io::read_degdist(dir / "bad.csv"), ParseError);
    write_text(dir / "bad.csv", "# n=4\nin,1,1.0\n");
    CHECK_THROWS_AS(io::read_degdist(dir / "bad.csv"), ParseError);

    io::write_degdist(d.p_in, d.p_out, d.n, dir / "rt.csv");
    const auto back = io::read_degdist(dir / "rt.csv");
    CHECK(back.p_in == d.p_in);
    CHECK(back.p_out == d.p_out);
    CHECK(back.n == d.n);
}

TEST_CASE("large-support degree distributions round-trip bit-exactly", "[io]")
{
    TempDir dir("io");
    const Index n = 1'000'000;
    std::vector<Index> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    Rng rng(5);
    for (Index i = 0; i < n; ++i) {
        in[static_cast<std::size_t>(i)] = static_cast<Index>(rng.below(400));
        out[static_cast<std::size_t>(i)] = static_cast<Index>(rng.below(3)) * 137;
    }
    const auto p_in = degree_distribution(in, DegreeKind::in);
    const auto p_out = degree_distribution(out, DegreeKind::out);
    io::write_degdist(p_in, p_out, n, dir / "big.csv");
    const auto back = io::read_degdist(dir / "big.csv");
    CHECK(back.p_in == p_in);
    CHECK(back.p_out == p_out);
}

TEST_CASE("bench records append under a single header", "[io]")
{
    TempDir dir("io");
    BenchRecord rec;
    rec.n = 3000;
    rec.k_avg = 2.0;
    rec.rank = 2400;
    rec.r_m = 0.8;
    rec.t_seconds = 0.001;
    rec.converged = true;
    io::append_bench_record(rec, dir / "b.csv");
    auto lines = lines_of(read_text(dir / "b.csv"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == io::kBenchHeader);
    CHECK(lines[1] == "sweep-n,fer,uniform,3000,2,,random-iid,0,2400,0.8,0.001,true");

    rec.method = Method::sprank;
    rec.converged.reset();
    rec.gamma = 3.0;
    io::append_bench_record(rec, dir / "b.csv");
    lines = lines_of(read_text(dir / "b.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[2] == "sweep-n,sprank,uniform,3000,2,3,random-iid,0,2400,0.8,0.001,");

    rec.t_seconds = std::nan("");
    CHECK_THROWS_AS(io::append_bench_record(rec, dir / "b.csv"), Error);
    CHECK(lines_of(read_text(dir / "b.csv")).size() == 3);
}
