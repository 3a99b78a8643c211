// fer: sparse-matrix rank estimation from degree distributions, with exact oracles.
//
// Every subcommand prints one `key=value` line on stdout; diagnostics go to
// stderr. Exit codes: 0 success, 1 usage error, 2 runtime or data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fer/algrank.hpp"
#include "fer/bench.hpp"
#include "fer/cavity.hpp"
#include "fer/error.hpp"
#include "fer/gen.hpp"
#include "fer/io.hpp"
#include "fer/match.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fer;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kFormats = {"matrix-market-real", "matrix-market-pattern", "edge-list"};

io::ReadResult load(const std::string& path, const std::string& format) {
    if (!fs::exists(path)) throw Error("input file '" + path + "' does not exist");
    auto res = format.empty() ? io::read_matrix(path) : io::read_matrix(path, io::parse_format(format));
    if (res.dropped_zeros)
        std::cerr << "note: dropped " << res.dropped_zeros << " explicit zero entries\n";
    return res;
}

std::string fmt(double v) { return io::format_shortest(v); }

/// Accepts "1,2,3", "2..8" (unit step) or a mix such as "1,3..5".
std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dots = item.find("..");
        try {
            if (dots == std::string::npos) {
                out.push_back(std::stod(item));
            } else {
                const double lo = std::stod(item.substr(0, dots));
                const double hi = std::stod(item.substr(dots + 2));
                if (hi < lo) throw UsageError("empty range '" + item + "'");
                for (double v = lo; v <= hi + 1e-9; v += 1.0) out.push_back(v);
            }
        } catch (const std::invalid_argument&) {
            throw UsageError("cannot parse list item '" + item + "'");
        } catch (const std::out_of_range&) {
            throw UsageError("list item out of range '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError("empty list '" + text + "'");
    return out;
}

std::vector<Method> parse_methods(const std::string& text) {
    std::vector<Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(parse_method(item));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

struct SolverFlags {
    std::string variant = "symmetric-half";
    SolverConfig cfg;

    void add(CLI::App* app) {
        app->add_option("--variant", variant, "Density formula variant")
            ->check(CLI::IsMember({"symmetric-half", "symmetric-full"}));
        app->add_option("--tol", cfg.tolerance, "Fixed-point tolerance")->check(CLI::PositiveNumber);
        app->add_option("--max-iter", cfg.max_iterations, "Iteration cap")->check(CLI::NonNegativeNumber);
        app->add_option("--damping", cfg.damping, "Damping weight in (0,1]")->check(CLI::Range(0.0, 1.0));
        app->add_option("--init", cfg.init, "Initial value of the unknowns")->check(CLI::Range(0.0, 1.0));
    }
};

nlohmann::json to_json(const RankEstimate& e) {
    const auto& fp = e.fixed_point;
    return {
        {"n", e.n},
        {"rank_est", e.rank_est},
        {"r_m", e.r_m},
        {"n_d", e.n_d},
        {"n_c", e.n_c},
        {"clamped", e.clamped},
        {"variant", std::string(to_string(e.variant.tag))},
        {"literal_n_d", e.literal_n_d},
        {"fixed_point",
         {{"w1", fp.w1}, {"w2", fp.w2}, {"wh1", fp.wh1}, {"wh2", fp.wh2},
          {"residual", fp.residual}, {"iterations", fp.iterations}, {"converged", fp.converged}}},
    };
}

struct BenchFlags {
    std::string n_list;
    std::string k_list;
    double k_avg = 2.0;
    std::string dist = "uniform";
    double gamma = 3.0;
    std::string weights;
    int reps = 10;
    std::string methods = "fer,sprank";
    std::string baseline;
    std::uint64_t seed = 1;
    std::string out;
    std::string summary;
    bool no_warmup = false;
    SolverFlags solver;

    void add_common(CLI::App* app) {
        app->add_option("--dist", dist, "uniform | powerlaw")->check(CLI::IsMember({"uniform", "powerlaw"}));
        app->add_option("--gamma", gamma, "Power-law exponent");
        app->add_option("--reps", reps, "Repetitions per point")->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "Base seed");
        app->add_option("--out", out, "Record CSV (appended)")->required();
        app->add_option("--summary", summary, "Comparison CSV (default: <out>.summary.csv)");
        app->add_flag("--no-warmup", no_warmup, "Skip the untimed warm-up run");
        solver.add(app);
    }

    void add_methods(CLI::App* app) {
        app->add_option("--weights", weights, "random-iid | all-ones")
            ->check(CLI::IsMember({"random-iid", "all-ones"}));
        app->add_option("--methods", methods, "Comma list of fer,sprank,fieldrank,numrank");
        app->add_option("--baseline", baseline, "Baseline method for delta_r_m")
            ->check(CLI::IsMember({"sprank", "fieldrank", "numrank"}));
    }

    SweepConfig config() const {
        SweepConfig cfg;
        cfg.dist = parse_distribution(dist);
        cfg.gamma = gamma;
        cfg.weight_mode = weights.empty() ? WeightMode::random_iid : parse_weight_mode(weights);
        cfg.reps = reps;
        cfg.methods = parse_methods(methods);
        if (!baseline.empty()) cfg.baseline = parse_method(baseline);
        cfg.seed = seed;
        cfg.out_path = out;
        cfg.summary_path = summary;
        cfg.warmup = !no_warmup;
        cfg.solver = solver.cfg;
        cfg.variant = parse_variant(solver.variant);
        return cfg;
    }
};

int report_rows(const std::vector<ComparisonRow>& rows) {
    bool failed = false;
    for (const auto& r : rows) {
        std::cout << describe(r) << '\n';
        if (!r.ok()) {
            failed = true;
            std::cerr << "error: n=" << r.n << " k_avg=" << fmt(r.k_avg) << ": " << r.error << '\n';
        }
    }
    return failed ? 2 : 0;
}

Index single_n(const std::string& text) {
    const auto v = parse_list(text);
    if (v.size() != 1) throw UsageError("--n takes a single value here");
    return static_cast<Index>(v.front());
}

int run(int argc, char** argv) {
    CLI::App app{"Sparse-matrix rank estimation via the cavity method"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a random sparse matrix");
    GenSpec spec;
    std::string gen_dist = "uniform", gen_weights = "random-iid", gen_out, gen_format;
    gen->add_option("--n", spec.n, "Dimension")->required()->check(CLI::PositiveNumber);
    gen->add_option("--kavg", spec.k_avg, "Nonzeros per row")->required();
    gen->add_option("--dist", gen_dist, "uniform | powerlaw")->check(CLI::IsMember({"uniform", "powerlaw"}));
    gen->add_option("--gamma", spec.gamma, "Power-law exponent");
    gen->add_option("--weights", gen_weights, "random-iid | all-ones")
        ->check(CLI::IsMember({"random-iid", "all-ones"}));
    gen->add_option("--seed", spec.seed, "Seed");
    gen->add_option("--out", gen_out, "Output file")->required();
    gen->add_option("--format", gen_format, "Output format")->check(CLI::IsMember(kFormats));

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate the rank from degree distributions");
    std::string est_in, est_degdist, est_format, est_json;
    std::optional<Index> est_n;
    SolverFlags est_solver;
    auto* in_opt = est->add_option("--in", est_in, "Matrix file");
    auto* dd_opt = est->add_option("--from-degdist", est_degdist, "Degree-distribution CSV");
    in_opt->excludes(dd_opt);
    est->add_option("--n", est_n, "Node count (overrides the CSV header)")->needs(dd_opt)->check(CLI::PositiveNumber);
    est->add_option("--format", est_format, "Input format")->check(CLI::IsMember(kFormats));
    est->add_option("--json", est_json, "Write the full estimate, fixed point included, as JSON");
    est_solver.add(est);

    // sprank
    auto* spr = app.add_subcommand("sprank", "Structural rank by maximum matching");
    std::string spr_in, spr_format;
    spr->add_option("--in", spr_in, "Matrix file")->required();
    spr->add_option("--format", spr_format, "Input format")->check(CLI::IsMember(kFormats));

    // fieldrank
    auto* fld = app.add_subcommand("fieldrank", "Exact rank over a prime field");
    std::string fld_in, fld_format;
    std::uint64_t fld_prime = kMersenne61, fld_seed = 1;
    bool fld_random = false;
    int fld_digits = 12;
    fld->add_option("--in", fld_in, "Matrix file")->required();
    fld->add_option("--format", fld_format, "Input format")->check(CLI::IsMember(kFormats));
    fld->add_option("--prime", fld_prime, "Field modulus");
    fld->add_flag("--randomize-weights", fld_random, "Replace values by random field elements");
    fld->add_option("--seed", fld_seed, "Seed for --randomize-weights");
    fld->add_option("--precision", fld_digits, "Decimal digits kept when mapping values")->check(CLI::Range(0, 18));

    // numrank
    auto* num = app.add_subcommand("numrank", "Numerical rank by SVD (n <= 4000)");
    std::string num_in, num_format;
    std::optional<double> num_tol;
    num->add_option("--in", num_in, "Matrix file")->required();
    num->add_option("--format", num_format, "Input format")->check(CLI::IsMember(kFormats));
    num->add_option("--tol", num_tol, "Relative singular-value threshold")->check(CLI::PositiveNumber);

    // degdist
    auto* dd = app.add_subcommand("degdist", "Write the in/out degree distributions");
    std::string dd_in, dd_out, dd_format;
    dd->add_option("--in", dd_in, "Matrix file")->required();
    dd->add_option("--out", dd_out, "Output CSV")->required();
    dd->add_option("--format", dd_format, "Input format")->check(CLI::IsMember(kFormats));

    // bench
    auto* bench = app.add_subcommand("bench", "Accuracy and timing sweeps");
    bench->require_subcommand(1);
    BenchFlags sn, sk, corr;
    auto* sweep_n = bench->add_subcommand("sweep-n", "Sweep n at fixed k_avg");
    sweep_n->add_option("--n", sn.n_list, "List of n")->required();
    sweep_n->add_option("--kavg", sn.k_avg, "Nonzeros per row");
    sn.add_common(sweep_n);
    sn.add_methods(sweep_n);
    auto* sweep_k = bench->add_subcommand("sweep-k", "Sweep k_avg at fixed n");
    sweep_k->add_option("--n", sk.n_list, "n")->required();
    sweep_k->add_option("--k", sk.k_list, "List or range of k_avg")->required();
    sk.add_common(sweep_k);
    sk.add_methods(sweep_k);
    auto* corr_cmd = bench->add_subcommand("corr", "All-ones weights: fer, sprank, fieldrank");
    corr_cmd->add_option("--n", corr.n_list, "n")->required();
    corr_cmd->add_option("--k", corr.k_list, "List or range of k_avg")->required();
    corr.add_common(corr_cmd);

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Pick the density formula variant against exact matching");
    std::string cal_k = "1.5,2,3,4", cal_report;
    Index cal_n = 100000;
    int cal_seeds = 5;
    std::uint64_t cal_seed = 1;
    SolverFlags cal_solver;
    cal->add_option("--k", cal_k, "List of k_avg");
    cal->add_option("--n", cal_n, "Instance size")->check(CLI::PositiveNumber);
    cal->add_option("--seeds", cal_seeds, "Instances per k")->check(CLI::PositiveNumber);
    cal->add_option("--seed", cal_seed, "Base seed");
    cal->add_option("--report", cal_report, "Write the per-instance error table");
    cal->add_option("--tol", cal_solver.cfg.tolerance, "Fixed-point tolerance")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen) {
            spec.dist = parse_distribution(gen_dist);
            spec.weight_mode = parse_weight_mode(gen_weights);
            const auto m = generate(spec);
            const auto format = gen_format.empty() ? io::detect_format(gen_out) : io::parse_format(gen_format);
            io::write_matrix(m, gen_out, format);
            std::cout << "n=" << m.n() << " nnz=" << m.nnz() << " k_avg=" << fmt(mean_row_degree(m.pattern()))
                      << " path=" << gen_out << '\n';
            return 0;
        }
        if (*est) {
            const auto variant = parse_variant(est_solver.variant);
            RankEstimate e;
            if (!est_in.empty()) {
                e = estimate_rank(load(est_in, est_format).matrix.pattern(), est_solver.cfg, variant);
            } else if (!est_degdist.empty()) {
                const auto d = io::read_degdist(est_degdist);
                e = estimate_rank_from_distributions(d.p_in, d.p_out, est_n.value_or(d.n), est_solver.cfg, variant);
            } else {
                throw UsageError("estimate needs --in or --from-degdist");
            }
            if (!e.fixed_point.converged)
                std::cerr << "warning: fixed point did not converge (residual " << e.fixed_point.residual << ")\n";
            if (e.clamped) std::cerr << "warning: unmatched density clamped into [0,1]\n";
            std::cout << "rank_est=" << e.rank_est << " r_m=" << fmt(e.r_m) << " n_d=" << fmt(e.n_d)
                      << " converged=" << (e.fixed_point.converged ? "true" : "false")
                      << " iterations=" << e.fixed_point.iterations << " variant=" << to_string(e.variant.tag)
                      << '\n';
            if (!est_json.empty()) {
                std::ofstream out(est_json);
                if (!out) throw Error("cannot open '" + est_json + "' for writing");
                out << to_json(e).dump(2) << '\n';
            }
            return 0;
        }
        if (*spr) {
            const auto m = load(spr_in, spr_format).matrix;
            std::cout << "sprank=" << sprank(m.pattern()) << " n=" << m.n() << " nnz=" << m.nnz() << '\n';
            return 0;
        }
        if (*fld) {
            const auto m = load(fld_in, fld_format).matrix;
            FieldRankResult r;
            if (fld_random) {
                r = generic_rank(m.pattern(), fld_prime, fld_seed);
            } else {
                FieldRankOptions opts;
                opts.prime = fld_prime;
                opts.precision_digits = fld_digits;
                r = field_rank(m, opts);
            }
            std::cout << "rank=" << r.rank << " prime=" << r.prime << " n=" << m.n() << " nnz=" << m.nnz();
            if (r.weight_seed) std::cout << " weight_seed=" << *r.weight_seed;
            std::cout << '\n';
            return 0;
        }
        if (*num) {
            const auto m = load(num_in, num_format).matrix;
            std::cout << "numrank=" << numerical_rank(m, num_tol) << " n=" << m.n() << " nnz=" << m.nnz() << '\n';
            return 0;
        }
        if (*dd) {
            const auto m = load(dd_in, dd_format).matrix;
            const auto [p_in, p_out] = degree_laws(m.pattern());
            io::write_degdist(p_in, p_out, m.n(), dd_out);
            std::cout << "n=" << m.n() << " mean_in=" << fmt(p_in.mean()) << " mean_out=" << fmt(p_out.mean())
                      << " path=" << dd_out << '\n';
            return 0;
        }
        if (*bench) {
            if (*sweep_n) {
                std::vector<Index> ns;
                for (double v : parse_list(sn.n_list)) ns.push_back(static_cast<Index>(v));
                return report_rows(run_sweep_n(ns, sn.k_avg, sn.config()));
            }
            if (*sweep_k) {
                const auto ks = parse_list(sk.k_list);
                return report_rows(run_sweep_k(single_n(sk.n_list), ks, sk.config()));
            }
            if (*corr_cmd) {
                const auto ks = parse_list(corr.k_list);
                return report_rows(run_correlated(single_n(corr.n_list), ks, corr.config()));
            }
        }
        if (*cal) {
            const auto ks = parse_list(cal_k);
            std::vector<std::uint64_t> seeds;
            for (int i = 0; i < cal_seeds; ++i) seeds.push_back(cal_seed + static_cast<std::uint64_t>(i));
            const auto report = calibrate_variant(ks, cal_n, seeds, cal_solver.cfg);
            if (!cal_report.empty()) {
                std::ofstream out(cal_report);
                if (!out) throw Error("cannot open '" + cal_report + "' for writing");
                out << report.table();
            }
            std::cout << "variant=" << to_string(report.winner.tag);
            for (const auto& [v, err] : report.mean_error)
                std::cout << " error_" << to_string(v.tag) << '=' << fmt(err);
            std::cout << '\n';
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n' << app.help();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
