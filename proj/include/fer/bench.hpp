#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fer/algrank.hpp"
#include "fer/bench_record.hpp"
#include "fer/cavity.hpp"
#include "fer/gen.hpp"

namespace fer {

struct Metrics {
    double r_m_est = 0.0;
    double r_m_base = 0.0;
    std::optional<double> delta_r_m;  ///< none when the baseline rank is 0
};

/// r_M = rank / n and Δr_M = |r_est − r_base| / r_base.
Metrics metrics(Index r_est, Index r_base, Index n);

struct SweepConfig {
    Distribution dist = Distribution::uniform;
    double gamma = 3.0;
    WeightMode weight_mode = WeightMode::random_iid;
    int reps = 10;
    std::vector<Method> methods = {Method::fer, Method::sprank};
    /// Defaults to sprank when present, then numrank, then fieldrank.
    std::optional<Method> baseline;
    std::uint64_t seed = 1;
    std::filesystem::path out_path;      ///< BenchRecord CSV; empty disables
    std::filesystem::path summary_path;  ///< comparison CSV; empty derives from out_path
    SolverConfig solver;
    FormulaVariant variant;
    std::uint64_t prime = kMersenne61;
    bool warmup = true;
};

struct SweepPoint {
    Index n = 0;
    double k_avg = 0.0;
};

struct MethodSummary {
    Method method = Method::fer;
    double mean_r_m = 0.0;
    double mean_t_seconds = 0.0;
    std::optional<double> mean_delta_r_m;  ///< against the row's baseline, over reps where defined
    int non_converged = 0;
};

/// Rep-averaged comparison of every method at one sweep point.
struct ComparisonRow {
    Experiment experiment = Experiment::sweep_n;
    Distribution dist = Distribution::uniform;
    Index n = 0;
    double k_avg = 0.0;
    std::optional<double> gamma;
    WeightMode weight_mode = WeightMode::random_iid;
    std::uint64_t base_seed = 0;
    int reps = 0;
    Method baseline = Method::sprank;
    std::vector<MethodSummary> methods;
    /// (sprank − fieldrank) / n averaged over reps, and the extreme per-rep gaps,
    /// when both methods ran.
    std::optional<double> gap_mean;
    std::optional<Index> gap_min;
    std::optional<Index> gap_max;
    /// Every FER fixed point lay in [0,1]^4 and, when converged, one undamped
    /// step moved no coordinate by more than 10·tolerance.
    bool certificates_ok = true;
    std::string error;  ///< non-empty when the point failed

    const MethodSummary* find(Method m) const;
    bool ok() const { return error.empty(); }
};

/// Seed of repetition `rep` at (n, k_avg) under base seed `seed`.
std::uint64_t instance_seed(std::uint64_t seed, Index n, double k_avg, int rep);

/// Generates reps instances per point, times each method on them (generation
/// excluded, one untimed warm-up per method) and summarizes. Failures become
/// error rows; the sweep continues.
std::vector<ComparisonRow> run_grid(Experiment experiment, std::span<const SweepPoint> points,
                                    const SweepConfig& cfg);

std::vector<ComparisonRow> run_sweep_n(std::span<const Index> n_values, double k_avg,
                                       const SweepConfig& cfg);
std::vector<ComparisonRow> run_sweep_k(Index n, std::span<const double> k_values,
                                       const SweepConfig& cfg);
/// Forces all-ones weights, methods {fer, sprank, fieldrank} and baseline fieldrank.
std::vector<ComparisonRow> run_correlated(Index n, std::span<const double> k_values,
                                          SweepConfig cfg);

std::filesystem::path default_summary_path(const std::filesystem::path& out_path);

/// One line per comparison row, fixed column order.
void write_summary(std::span<const ComparisonRow> rows, const std::filesystem::path& path);

/// `key=value` rendering for standard output.
std::string describe(const ComparisonRow& row);

/// Checks the fixed-point certificate described on ComparisonRow::certificates_ok.
bool verify_fixed_point(const DegreeDistribution& p_in, const DegreeDistribution& p_out,
                        const CavityFixedPoint& fp, double tolerance);

}  // namespace fer
