#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <map>
#include <sys/wait.h>

#include "fer/gen.hpp"
#include "fer/io.hpp"
#include "test_support.hpp"

using namespace fer;
using namespace fer::testing;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(const std::string& args, const TempDir& dir) {
    const auto err_path = dir / "stderr.txt";
    const std::string cmd = std::string(FER_CLI_PATH) + " " + args + " 2>" + err_path.string();
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    for (std::size_t got; (got = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_text(err_path);
    return r;
}

std::map<std::string, std::string> fields(const std::string& line) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(line);
    for (std::string tok; ss >> tok;) {
        const auto eq = tok.find('=');
        REQUIRE(eq != std::string::npos);
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

std::vector<double> probs(const DegreeDistribution& d) { return {d.probs().begin(), d.probs().end()}; }

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("generate is deterministic", "[cli]")
{
    TempDir dir("cli");
    const auto a = run("generate --n 100 --kavg 2 --dist uniform --seed 7 --out " + q(dir / "a.mtx"), dir);
    const auto b = run("generate --n 100 --kavg 2 --dist uniform --seed 7 --out " + q(dir / "b.mtx"), dir);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(read_text(dir / "a.mtx") == read_text(dir / "b.mtx"));
    const auto kv = fields(a.out);
    CHECK(kv.at("n") == "100");
    CHECK(kv.at("nnz") == "200");

    REQUIRE(run("generate --n 100 --kavg 2 --dist powerlaw --weights all-ones --seed 7 --out " + q(dir / "p.el"), dir).code == 0);
    CHECK(io::read_matrix(dir / "p.el").matrix.weight_mode() == WeightMode::all_ones);
}

TEST_CASE("estimate, sprank, fieldrank and numrank report key=value lines", "[cli]")
{
    TempDir dir("cli");
    REQUIRE(run("generate --n 300 --kavg 3 --seed 1 --out " + q(dir / "m.mtx"), dir).code == 0);
    const auto m = io::read_matrix(dir / "m.mtx").matrix;

    const auto e = run("estimate --in " + q(dir / "m.mtx"), dir);
    REQUIRE(e.code == 0);
    CHECK(e.out.rfind("rank_est=", 0) == 0);
    auto kv = fields(e.out);
    for (const char* key : {"rank_est", "r_m", "n_d", "converged", "iterations", "variant"}) CHECK(kv.count(key));
    CHECK(kv.at("variant") == "symmetric-half");
    CHECK(kv.at("converged") == "true");

    const auto s = run("sprank --in " + q(dir / "m.mtx"), dir);
    REQUIRE(s.code == 0);
    kv = fields(s.out);
    CHECK(kv.at("n") == "300");
    CHECK(kv.at("nnz") == "900");
    const Index sp = std::stoll(kv.at("sprank"));
    CHECK(std::abs(std::stoll(fields(e.out).at("rank_est")) - sp) <= 6);

    const auto f = run("fieldrank --in " + q(dir / "m.mtx"), dir);
    REQUIRE(f.code == 0);
    CHECK(std::stoll(fields(f.out).at("rank")) == sp);
    const auto fr = run("fieldrank --randomize-weights --seed 3 --in " + q(dir / "m.mtx"), dir);
    REQUIRE(fr.code == 0);
    CHECK(fields(fr.out).at("weight_seed") == "3");

    const auto nr = run("numrank --in " + q(dir / "m.mtx"), dir);
    REQUIRE(nr.code == 0);
    CHECK(std::stoll(fields(nr.out).at("numrank")) == sp);

    REQUIRE(run("estimate --json " + q(dir / "e.json") + " --in " + q(dir / "m.mtx"), dir).code == 0);
    const auto json = read_text(dir / "e.json");
    CHECK(json.find("\"fixed_point\"") != std::string::npos);
    CHECK(json.find("\"w1\"") != std::string::npos);
    (void)m;
}

TEST_CASE("exit codes", "[cli]")
{
    TempDir dir("cli");
    const auto missing = run("sprank --in " + q(dir / "missing.mtx"), dir);
    CHECK(missing.code == 2);
    CHECK(missing.out.empty());
    CHECK_FALSE(missing.err.empty());

    CHECK(run("sprank --in x.mtx --bogus", dir).code == 1);
    CHECK(run("", dir).code == 1);
    CHECK(run("estimate", dir).code == 1);
    CHECK(run("generate --n 0 --kavg 2 --out " + q(dir / "z.mtx"), dir).code != 0);

    write_text(dir / "bad.mtx", "%%MatrixMarket matrix coordinate real general\n2 3 0\n");
    const auto bad = run("estimate --in " + q(dir / "bad.mtx"), dir);
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 2") != std::string::npos);

    write_text(dir / "third.mtx", "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 0.333333333333333\n");
    CHECK(run("fieldrank --in " + q(dir / "third.mtx"), dir).code == 2);
}

TEST_CASE("degdist command", "[cli]")
{
    TempDir dir("cli");
    const WeightedSparseMatrix id(SparsityPattern::identity(5), std::vector<double>(5, 1.0), WeightMode::all_ones);
    io::write_matrix(id, dir / "id.mtx", io::MatrixFileFormat::matrix_market_pattern);
    REQUIRE(run("degdist --in " + q(dir / "id.mtx") + " --out " + q(dir / "id.csv"), dir).code == 0);
    auto d = io::read_degdist(dir / "id.csv");
    CHECK(d.n == 5);
    CHECK(probs(d.p_in) == std::vector<double>{0.0, 1.0});
    CHECK(probs(d.p_out) == std::vector<double>{0.0, 1.0});

    const WeightedSparseMatrix empty(SparsityPattern(4), {}, WeightMode::all_ones);
    io::write_matrix(empty, dir / "e.mtx", io::MatrixFileFormat::matrix_market_pattern);
    REQUIRE(run("degdist --in " + q(dir / "e.mtx") + " --out " + q(dir / "e.csv"), dir).code == 0);
    d = io::read_degdist(dir / "e.csv");
    CHECK(probs(d.p_in) == std::vector<double>{1.0});
    CHECK(probs(d.p_out) == std::vector<double>{1.0});
    const auto e = run("estimate --from-degdist " + q(dir / "e.csv"), dir);
    REQUIRE(e.code == 0);
    CHECK(fields(e.out).at("rank_est") == "0");
}

TEST_CASE("estimate from file equals estimate from its degree distributions", "[cli]")
{
    TempDir dir("cli");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        GenSpec spec;
        spec.n = 20 + static_cast<Index>(rng.below(2000));
        spec.k_avg = 1.0 + 5.0 * rng.unit();
        spec.dist = seed % 2 ? Distribution::uniform : Distribution::powerlaw;
        if (spec.dist == Distribution::powerlaw) spec.k_avg = std::max(spec.k_avg, 1.6);
        spec.seed = seed;
        const auto m = generate(spec);
        io::write_matrix(m, dir / "m.mtx", io::MatrixFileFormat::matrix_market_real);
        const auto direct = run("estimate --in " + q(dir / "m.mtx"), dir);
        REQUIRE(run("degdist --in " + q(dir / "m.mtx") + " --out " + q(dir / "m.csv"), dir).code == 0);
        const auto via = run("estimate --from-degdist " + q(dir / "m.csv"), dir);
        const auto via_n = run("estimate --from-degdist " + q(dir / "m.csv") + " --n " + std::to_string(spec.n), dir);
        REQUIRE(direct.code == 0);
        REQUIRE(direct.out == via.out);
        REQUIRE(direct.out == via_n.out);
    }
}

TEST_CASE("bench and calibrate subcommands", "[cli]")
{
    TempDir dir("cli");
    const auto ok = run("bench sweep-n --n 200,400 --kavg 2 --reps 2 --methods fer,sprank --out " + q(dir / "r.csv"), dir);
    CHECK(ok.code == 0);
    CHECK(lines_of(read_text(dir / "r.csv")).size() == 1 + 2 * 2 * 2);
    CHECK(lines_of(read_text(dir / "r.summary.csv")).size() == 1 + 2);
    for (const auto& line : lines_of(ok.out)) fields(line);

    const auto sk = run("bench sweep-k --n 300 --k 0,2 --reps 1 --out " + q(dir / "k.csv"), dir);
    CHECK(sk.code == 2);
    CHECK(lines_of(read_text(dir / "k.csv")).size() == 1 + 2);

    const auto corr = run("bench corr --n 200 --k 2..4 --reps 2 --out " + q(dir / "c.csv"), dir);
    CHECK(corr.code == 0);
    CHECK(lines_of(read_text(dir / "c.summary.csv")).size() == 1 + 3);
    CHECK(read_text(dir / "c.csv").find("correlated,fieldrank,uniform,200,4,,all-ones,") != std::string::npos);

    const auto cal = run("calibrate --k 2 --n 2000 --seeds 1 --report " + q(dir / "cal.txt"), dir);
    CHECK(cal.code == 0);
    CHECK(fields(cal.out).at("variant") == "symmetric-half");
    CHECK_FALSE(read_text(dir / "cal.txt").empty());

    CHECK(run("bench sweep-n --n 200 --kavg 2 --reps 0 --out " + q(dir / "x.csv"), dir).code == 1);
    CHECK(run("bench sweep-n --n 200 --kavg 2 --methods fer,svd --out " + q(dir / "x.csv"), dir).code == 1);
}
