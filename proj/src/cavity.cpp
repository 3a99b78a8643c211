#include "fer/cavity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "fer/error.hpp"
#include "fer/gen.hpp"
#include "fer/match.hpp"

namespace fer {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double horner(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

void require_unit_interval(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw Error("generating function argument " + std::to_string(x) + " outside [0,1]");
}

}  // namespace

GeneratingFunctions::GeneratingFunctions(const DegreeDistribution& d)
    : probs_(d.probs().begin(), d.probs().end()) {
    const double mean = d.mean();
    if (mean > 0.0) {
        excess_.resize(probs_.size() - 1);
        for (std::size_t k = 0; k + 1 < probs_.size(); ++k)
            excess_[k] = static_cast<double>(k + 1) * probs_[k + 1] / mean;
    }
}

double GeneratingFunctions::g(double x) const { return clamp01(horner(probs_, x)); }

double GeneratingFunctions::h(double x) const {
    if (excess_.empty()) throw ZeroMeanDegree();
    return clamp01(horner(excess_, x));
}

double eval_gf(const DegreeDistribution& d, double x) {
    require_unit_interval(x);
    return GeneratingFunctions(d).g(x);
}

double eval_excess_gf(const DegreeDistribution& d, double x) {
    require_unit_interval(x);
    if (!(d.mean() > 0.0)) throw ZeroMeanDegree();
    return GeneratingFunctions(d).h(x);
}

void validate(const SolverConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw Error("solver tolerance must be positive");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw Error("damping must lie in (0, 1]");
    if (!(cfg.init >= 0.0 && cfg.init <= 1.0)) throw Error("init must lie in [0, 1]");
    if (cfg.max_iterations < 0) throw Error("max_iterations must be non-negative");
}

Eigen::Array4d cavity_map(const GeneratingFunctions& out_gf, const GeneratingFunctions& in_gf,
                          const Eigen::Array4d& x) {
    const double w1 = x[0], w2 = x[1], wh1 = x[2], wh2 = x[3];
    return {out_gf.h(wh2), 1.0 - out_gf.h(1.0 - wh1), in_gf.h(w2), 1.0 - in_gf.h(1.0 - w1)};
}

namespace {
constexpr double kSymmetryNudge = 1e-6;
}

CavityFixedPoint solve_fixed_point(const DegreeDistribution& p_in, const DegreeDistribution& p_out,
                                   const SolverConfig& cfg) {
    validate(cfg);
    if (!(p_in.mean() > 0.0) || !(p_out.mean() > 0.0)) throw ZeroMeanDegree();
    const GeneratingFunctions in_gf(p_in), out_gf(p_out);

    // With identical in/out laws the line w1 + wh2 = 1 is invariant from a
    // symmetric start, and above k = e the only fixed point on it is the wrong
    // (middle) one. A tiny opposite nudge on w1 and wh1 lets the iteration leave it.
    Eigen::Array4d x(cfg.init - kSymmetryNudge, cfg.init, cfg.init + kSymmetryNudge, cfg.init);
    x = x.cwiseMax(0.0).cwiseMin(1.0);
    CavityFixedPoint fp;
    std::int64_t it = 0;
    for (;; ++it) {
        const Eigen::Array4d fx = cavity_map(out_gf, in_gf, x);
        fp.residual = (fx - x).abs().maxCoeff();
        if (fp.residual <= cfg.tolerance) {
            fp.converged = true;
            break;
        }
        if (it == cfg.max_iterations) break;
        x = (x + cfg.damping * (fx - x)).cwiseMax(0.0).cwiseMin(1.0);
    }
    fp.iterations = it;
    fp.w1 = x[0];
    fp.w2 = x[1];
    fp.wh1 = x[2];
    fp.wh2 = x[3];
    return fp;
}

std::string_view to_string(FormulaTag tag) {
    switch (tag) {
        case FormulaTag::symmetric_half: return "symmetric-half";
        case FormulaTag::symmetric_full: return "symmetric-full";
        case FormulaTag::paper_literal: return "paper-literal";
    }
    return "symmetric-half";
}

FormulaVariant parse_variant(std::string_view text) {
    if (text == "symmetric-half") return {FormulaTag::symmetric_half};
    if (text == "symmetric-full") return {FormulaTag::symmetric_full};
    if (text == "paper-literal") return {FormulaTag::paper_literal};
    throw Error("unknown formula variant '" + std::string(text) + "'");
}

NcDensity evaluate_nc_density(const DegreeDistribution& p_in, const DegreeDistribution& p_out,
                              const CavityFixedPoint& fp, double k_row, FormulaVariant variant) {
    const GeneratingFunctions in_gf(p_in), out_gf(p_out);
    const double g_a = out_gf.g(fp.wh2), g_b = out_gf.g(1.0 - fp.wh1);
    const double gh_a = in_gf.g(fp.w2), gh_b = in_gf.g(1.0 - fp.w1);
    const double coupling = fp.wh1 * (1.0 - fp.w2) + fp.w1 * (1.0 - fp.wh2);

    NcDensity d;
    if (variant.tag == FormulaTag::paper_literal) {
        d.raw = 1.0 - 0.5 * (g_a + g_b - 1.0) + (gh_a + gh_b - 1.0) + 0.5 * k_row * coupling;
    } else {
        d.raw = 0.5 * (g_a + g_b - 2.0 + gh_a + gh_b) + variant.coefficient() * k_row * coupling;
    }
    d.value = clamp01(d.raw);
    d.clamped = d.value != d.raw;
    return d;
}

RankEstimate estimate_rank_from_distributions(const DegreeDistribution& p_in,
                                              const DegreeDistribution& p_out, Index n,
                                              const SolverConfig& cfg, FormulaVariant variant) {
    if (n < 1) throw Error("n must be positive");
    validate(cfg);
    if (std::abs(p_in.mean() - p_out.mean()) > 1e-9)
        throw InconsistentMeans(p_in.mean(), p_out.mean());

    RankEstimate est;
    est.n = n;
    est.variant = variant;
    if (p_in.mean() == 0.0 && p_out.mean() == 0.0) {
        est.n_d = 1.0;
        est.literal_n_d = 1.0;
        est.n_c = static_cast<double>(n);
        est.rank_est = 0;
        est.r_m = 0.0;
        est.fixed_point.converged = true;
        return est;
    }

    const double k_row = p_in.mean();
    est.fixed_point = solve_fixed_point(p_in, p_out, cfg);
    const NcDensity d = evaluate_nc_density(p_in, p_out, est.fixed_point, k_row, variant);
    est.n_d = d.value;
    est.clamped = d.clamped;
    est.literal_n_d =
        evaluate_nc_density(p_in, p_out, est.fixed_point, k_row, {FormulaTag::paper_literal}).value;
    est.n_c = static_cast<double>(n) * est.n_d;
    est.rank_est = std::clamp<Index>(std::llround(static_cast<double>(n) * (1.0 - est.n_d)), 0, n);
    est.r_m = static_cast<double>(est.rank_est) / static_cast<double>(n);
    return est;
}

RankEstimate estimate_rank(const SparsityPattern& p, const SolverConfig& cfg, FormulaVariant variant) {
    const DegreeLaws laws = degree_laws(p);
    return estimate_rank_from_distributions(laws.in, laws.out, p.n(), cfg, variant);
}

std::string CalibrationReport::table() const {
    std::ostringstream os;
    os << "variant,k,seed,cavity_n_d,exact_n_d,abs_error\n";
    for (const auto& c : cells)
        os << to_string(c.variant.tag) << ',' << c.k << ',' << c.seed << ',' << c.cavity_n_d << ','
           << c.exact_n_d << ',' << c.error() << '\n';
    for (const auto& [v, e] : mean_error) os << "# mean_abs_error " << to_string(v.tag) << '=' << e << '\n';
    os << "# winner=" << to_string(winner.tag) << '\n';
    return os.str();
}

CalibrationReport calibrate_variant(const std::vector<double>& k_values, Index n,
                                    const std::vector<std::uint64_t>& seeds,
                                    const SolverConfig& cfg) {
    if (k_values.empty()) throw Error("calibration needs at least one k value");
    if (seeds.empty()) throw Error("calibration needs at least one seed");
    const std::vector<FormulaVariant> candidates = {{FormulaTag::symmetric_half},
                                                    {FormulaTag::symmetric_full}};

    struct Job {
        double k;
        std::uint64_t seed;
        std::vector<double> cavity;
        double exact = 0.0;
    };
    std::vector<Job> jobs;
    for (double k : k_values)
        for (auto s : seeds) jobs.push_back({k, s, {}, 0.0});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            Job& job = jobs[i];
            GenSpec spec;
            spec.n = n;
            spec.k_avg = job.k;
            spec.weight_mode = WeightMode::all_ones;
            spec.seed = job.seed;
            const auto pattern = gen_uniform(spec).pattern();
            job.exact = static_cast<double>(n - sprank(pattern)) / static_cast<double>(n);
            const auto [p_in, p_out] = degree_laws(pattern);
            const auto fp = solve_fixed_point(p_in, p_out, cfg);
            for (const auto& v : candidates)
                job.cavity.push_back(evaluate_nc_density(p_in, p_out, fp, p_in.mean(), v).value);
        }
    };
    const auto threads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, jobs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    CalibrationReport report;
    for (std::size_t v = 0; v < candidates.size(); ++v) {
        double total = 0.0;
        for (const auto& job : jobs) {
            CalibrationCell cell{candidates[v], job.k, job.seed, job.cavity[v], job.exact};
            total += cell.error();
            report.cells.push_back(cell);
        }
        report.mean_error.emplace_back(candidates[v], total / static_cast<double>(jobs.size()));
    }
    auto best = report.mean_error.begin();
    for (auto it = report.mean_error.begin(); it != report.mean_error.end(); ++it)
        if (it->second < best->second) best = it;
    report.winner = best->first;
    return report;
}

}  // namespace fer
