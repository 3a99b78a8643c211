#include "fer/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fer/error.hpp"
#include "fer/io.hpp"
#include "fer/match.hpp"
#include "fer/rng.hpp"

namespace fer {

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::sweep_n: return "sweep-n";
        case Experiment::sweep_k: return "sweep-k";
        case Experiment::correlated: return "correlated";
    }
    return "sweep-n";
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::fer: return "fer";
        case Method::sprank: return "sprank";
        case Method::fieldrank: return "fieldrank";
        case Method::numrank: return "numrank";
    }
    return "fer";
}

Method parse_method(std::string_view text) {
    if (text == "fer") return Method::fer;
    if (text == "sprank") return Method::sprank;
    if (text == "fieldrank") return Method::fieldrank;
    if (text == "numrank") return Method::numrank;
    throw Error("unknown method '" + std::string(text) + "'");
}

Metrics metrics(Index r_est, Index r_base, Index n) {
    if (n <= 0) throw Error("metrics need n > 0");
    Metrics m;
    m.r_m_est = static_cast<double>(r_est) / static_cast<double>(n);
    m.r_m_base = static_cast<double>(r_base) / static_cast<double>(n);
    if (r_base != 0)
        m.delta_r_m = static_cast<double>(std::abs(r_est - r_base)) / static_cast<double>(r_base);
    return m;
}

const MethodSummary* ComparisonRow::find(Method m) const {
    for (const auto& s : methods)
        if (s.method == m) return &s;
    return nullptr;
}

std::uint64_t instance_seed(std::uint64_t seed, Index n, double k_avg, int rep) {
    std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(n));
    s = derive_seed(s, std::bit_cast<std::uint64_t>(k_avg));
    return derive_seed(s, static_cast<std::uint64_t>(rep));
}

bool verify_fixed_point(const DegreeDistribution& p_in, const DegreeDistribution& p_out,
                        const CavityFixedPoint& fp, double tolerance) {
    const Eigen::Array4d x = fp.as_array();
    if ((x < 0.0).any() || (x > 1.0).any()) return false;
    if (!fp.converged) return true;
    const GeneratingFunctions in_gf(p_in), out_gf(p_out);
    return (cavity_map(out_gf, in_gf, x) - x).abs().maxCoeff() <= 10.0 * tolerance;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    Index rank = 0;
    std::optional<bool> converged;
};

Outcome run_method(Method method, const WeightedSparseMatrix& m, const SweepConfig& cfg,
                   RankEstimate* fer_out) {
    switch (method) {
        case Method::fer: {
            auto est = estimate_rank(m.pattern(), cfg.solver, cfg.variant);
            if (fer_out) *fer_out = est;
            return {est.rank_est, est.fixed_point.converged};
        }
        case Method::sprank: return {sprank(m.pattern()), std::nullopt};
        case Method::fieldrank: {
            FieldRankOptions opts;
            opts.prime = cfg.prime;
            return {field_rank(m, opts).rank, std::nullopt};
        }
        case Method::numrank: return {numerical_rank(m), std::nullopt};
    }
    throw Error("unknown method");
}

Method pick_baseline(const SweepConfig& cfg) {
    auto has = [&](Method m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end(); };
    if (cfg.baseline) {
        if (!has(*cfg.baseline)) throw Error("baseline method is not among the sweep methods");
        return *cfg.baseline;
    }
    for (Method m : {Method::sprank, Method::numrank, Method::fieldrank})
        if (has(m)) return m;
    throw Error("sweep needs a baseline method (sprank, numrank or fieldrank)");
}

ComparisonRow run_point(Experiment experiment, const SweepPoint& point, const SweepConfig& cfg,
                        Method baseline) {
    ComparisonRow row;
    row.experiment = experiment;
    row.dist = cfg.dist;
    row.n = point.n;
    row.k_avg = point.k_avg;
    if (cfg.dist == Distribution::powerlaw) row.gamma = cfg.gamma;
    row.weight_mode = cfg.weight_mode;
    row.base_seed = cfg.seed;
    row.reps = cfg.reps;
    row.baseline = baseline;

    const std::size_t nm = cfg.methods.size();
    std::vector<double> sum_rm(nm, 0.0), sum_t(nm, 0.0), sum_delta(nm, 0.0);
    std::vector<int> delta_count(nm, 0), non_converged(nm, 0);
    double gap_sum = 0.0;
    const bool track_gap =
        std::find(cfg.methods.begin(), cfg.methods.end(), Method::sprank) != cfg.methods.end() &&
        std::find(cfg.methods.begin(), cfg.methods.end(), Method::fieldrank) != cfg.methods.end();

    try {
        if (cfg.reps < 1) throw Error("reps must be >= 1");
        for (int rep = 0; rep < cfg.reps; ++rep) {
            GenSpec spec;
            spec.n = point.n;
            spec.k_avg = point.k_avg;
            spec.dist = cfg.dist;
            spec.gamma = cfg.gamma;
            spec.weight_mode = cfg.weight_mode;
            spec.seed = instance_seed(cfg.seed, point.n, point.k_avg, rep);
            const WeightedSparseMatrix m = generate(spec);

            std::vector<Index> ranks(nm, 0);
            std::vector<BenchRecord> records;
            for (std::size_t i = 0; i < nm; ++i) {
                if (cfg.warmup) run_method(cfg.methods[i], m, cfg, nullptr);
                RankEstimate est;
                const auto t0 = Clock::now();
                const Outcome out = run_method(cfg.methods[i], m, cfg, &est);
                const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
                ranks[i] = out.rank;
                if (cfg.methods[i] == Method::fer) {
                    if (!est.fixed_point.converged) ++non_converged[i];
                    if (m.nnz() > 0) {
                        const auto laws = degree_laws(m.pattern());
                        row.certificates_ok =
                            row.certificates_ok &&
                            verify_fixed_point(laws.in, laws.out, est.fixed_point, cfg.solver.tolerance);
                    }
                }
                BenchRecord rec;
                rec.experiment = experiment;
                rec.method = cfg.methods[i];
                rec.dist = cfg.dist;
                rec.n = point.n;
                rec.k_avg = point.k_avg;
                rec.gamma = row.gamma;
                rec.weight_mode = cfg.weight_mode;
                rec.seed = spec.seed;
                rec.rank = out.rank;
                rec.r_m = static_cast<double>(out.rank) / static_cast<double>(point.n);
                rec.t_seconds = secs;
                rec.converged = out.converged;
                records.push_back(rec);
                sum_rm[i] += rec.r_m;
                sum_t[i] += secs;
            }
            const auto base_idx = static_cast<std::size_t>(
                std::find(cfg.methods.begin(), cfg.methods.end(), baseline) - cfg.methods.begin());
            for (std::size_t i = 0; i < nm; ++i) {
                if (i == base_idx) continue;
                const Metrics mt = metrics(ranks[i], ranks[base_idx], point.n);
                if (mt.delta_r_m) {
                    sum_delta[i] += *mt.delta_r_m;
                    ++delta_count[i];
                }
            }
            if (track_gap) {
                Index sp = 0, fr = 0;
                for (std::size_t i = 0; i < nm; ++i) {
                    if (cfg.methods[i] == Method::sprank) sp = ranks[i];
                    if (cfg.methods[i] == Method::fieldrank) fr = ranks[i];
                }
                const Index gap = sp - fr;
                gap_sum += static_cast<double>(gap) / static_cast<double>(point.n);
                row.gap_min = row.gap_min ? std::min(*row.gap_min, gap) : gap;
                row.gap_max = row.gap_max ? std::max(*row.gap_max, gap) : gap;
            }
            if (!cfg.out_path.empty())
                for (const auto& rec : records) io::append_bench_record(rec, cfg.out_path);
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        return row;
    }

    const double reps = cfg.reps;
    for (std::size_t i = 0; i < nm; ++i) {
        MethodSummary s;
        s.method = cfg.methods[i];
        s.mean_r_m = sum_rm[i] / reps;
        s.mean_t_seconds = sum_t[i] / reps;
        if (delta_count[i] > 0) s.mean_delta_r_m = sum_delta[i] / delta_count[i];
        if (cfg.methods[i] == baseline) s.mean_delta_r_m = 0.0;
        s.non_converged = non_converged[i];
        row.methods.push_back(s);
    }
    if (track_gap) row.gap_mean = gap_sum / reps;
    return row;
}

}  // namespace

std::filesystem::path default_summary_path(const std::filesystem::path& out_path) {
    auto p = out_path;
    p.replace_extension();
    p += ".summary.csv";
    return p;
}

std::vector<ComparisonRow> run_grid(Experiment experiment, std::span<const SweepPoint> points,
                                    const SweepConfig& cfg) {
    if (cfg.methods.empty()) throw Error("sweep needs at least one method");
    const Method baseline = pick_baseline(cfg);
    std::vector<ComparisonRow> rows;
    rows.reserve(points.size());
    for (const auto& p : points) rows.push_back(run_point(experiment, p, cfg, baseline));
    const auto summary = !cfg.summary_path.empty()
                             ? cfg.summary_path
                             : (cfg.out_path.empty() ? std::filesystem::path{}
                                                     : default_summary_path(cfg.out_path));
    if (!summary.empty()) write_summary(rows, summary);
    return rows;
}

std::vector<ComparisonRow> run_sweep_n(std::span<const Index> n_values, double k_avg,
                                       const SweepConfig& cfg) {
    std::vector<SweepPoint> points;
    for (Index n : n_values) points.push_back({n, k_avg});
    return run_grid(Experiment::sweep_n, points, cfg);
}

std::vector<ComparisonRow> run_sweep_k(Index n, std::span<const double> k_values,
                                       const SweepConfig& cfg) {
    std::vector<SweepPoint> points;
    for (double k : k_values) points.push_back({n, k});
    return run_grid(Experiment::sweep_k, points, cfg);
}

std::vector<ComparisonRow> run_correlated(Index n, std::span<const double> k_values,
                                          SweepConfig cfg) {
    cfg.weight_mode = WeightMode::all_ones;
    cfg.methods = {Method::fer, Method::sprank, Method::fieldrank};
    cfg.baseline = Method::fieldrank;
    std::vector<SweepPoint> points;
    for (double k : k_values) points.push_back({n, k});
    return run_grid(Experiment::correlated, points, cfg);
}

namespace {

constexpr Method kAllMethods[] = {Method::fer, Method::sprank, Method::fieldrank, Method::numrank};

template <typename T, typename F>
std::string opt_field(const std::optional<T>& v, F&& fmt) {
    return v ? fmt(*v) : std::string();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

void write_summary(std::span<const ComparisonRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << "experiment,dist,n,k_avg,gamma,weight_mode,base_seed,reps,baseline";
    for (const char* field : {"r_m", "delta_r_m", "t_seconds"})
        for (Method m : kAllMethods) out << ',' << field << '_' << to_string(m);
    out << ",fer_non_converged,gap_mean,gap_min,gap_max,certificates_ok,error\n";
    auto num = [](double v) { return io::format_shortest(v); };
    auto integer = [](Index v) { return std::to_string(v); };
    for (const auto& r : rows) {
        out << to_string(r.experiment) << ',' << to_string(r.dist) << ',' << r.n << ','
            << num(r.k_avg) << ',' << opt_field(r.gamma, num) << ',' << to_string(r.weight_mode)
            << ',' << r.base_seed << ',' << r.reps << ',' << to_string(r.baseline);
        for (Method m : kAllMethods) {
            const auto* s = r.find(m);
            out << ',' << (s ? num(s->mean_r_m) : "");
        }
        for (Method m : kAllMethods) {
            const auto* s = r.find(m);
            out << ',' << (s ? opt_field(s->mean_delta_r_m, num) : "");
        }
        for (Method m : kAllMethods) {
            const auto* s = r.find(m);
            out << ',' << (s ? num(s->mean_t_seconds) : "");
        }
        const auto* f = r.find(Method::fer);
        out << ',' << (f ? std::to_string(f->non_converged) : "") << ','
            << opt_field(r.gap_mean, num) << ',' << opt_field(r.gap_min, integer) << ','
            << opt_field(r.gap_max, integer) << ',' << (r.certificates_ok ? "true" : "false")
            << ',' << csv_escape(r.error) << '\n';
    }
    out.flush();
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string describe(const ComparisonRow& r) {
    std::ostringstream os;
    os << "experiment=" << to_string(r.experiment) << " dist=" << to_string(r.dist) << " n=" << r.n
       << " k_avg=" << io::format_shortest(r.k_avg) << " reps=" << r.reps
       << " baseline=" << to_string(r.baseline);
    if (!r.ok()) {
        os << " status=error";
        return os.str();
    }
    for (const auto& s : r.methods) {
        os << " r_m_" << to_string(s.method) << '=' << io::format_shortest(s.mean_r_m);
        if (s.method != r.baseline && s.mean_delta_r_m)
            os << " delta_" << to_string(s.method) << '=' << io::format_shortest(*s.mean_delta_r_m);
        os << " t_" << to_string(s.method) << '=' << io::format_shortest(s.mean_t_seconds);
    }
    if (r.gap_mean) os << " gap_mean=" << io::format_shortest(*r.gap_mean);
    os << " status=ok";
    return os.str();
}

}  // namespace fer
