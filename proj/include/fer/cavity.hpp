#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fer/core.hpp"

namespace fer {

/// Probability generating function G(x) = Σ_k P(k) x^k. Requires x ∈ [0, 1].
double eval_gf(const DegreeDistribution& d, double x);

/// Excess-degree generating function H(x) = Σ_k (k+1) P(k+1) x^k / Σ_k k P(k).
/// Throws ZeroMeanDegree when the mean degree is zero.
double eval_excess_gf(const DegreeDistribution& d, double x);

/// G and H of one distribution with precomputed coefficients, evaluated by Horner.
class GeneratingFunctions {
public:
    explicit GeneratingFunctions(const DegreeDistribution& d);

    double g(double x) const;
    /// Throws ZeroMeanDegree when the mean degree is zero.
    double h(double x) const;
    bool has_edges() const noexcept { return !excess_.empty(); }

private:
    std::vector<double> probs_;
    std::vector<double> excess_;
};

struct SolverConfig {
    double tolerance = 1e-12;
    std::int64_t max_iterations = 100000;
    double damping = 0.5;  ///< weight of the new iterate, in (0, 1]
    double init = 0.5;     ///< starting value of all four unknowns
};

void validate(const SolverConfig& cfg);

/// Solution (ω₁, ω₂, ω̂₁, ω̂₂) of the coupled cavity equations.
struct CavityFixedPoint {
    double w1 = 0.0, w2 = 0.0, wh1 = 0.0, wh2 = 0.0;
    double residual = 0.0;   ///< max |F(x) - x| of the undamped map at the returned point
    std::int64_t iterations = 0;
    bool converged = false;

    Eigen::Array4d as_array() const { return {w1, w2, wh1, wh2}; }
};

/// The undamped map F: (ω₁, ω₂, ω̂₁, ω̂₂) ↦ (H(ω̂₂), 1 − H(1 − ω̂₁), Ĥ(ω₂), 1 − Ĥ(1 − ω₁)),
/// H from the out-degree law, Ĥ from the in-degree law.
Eigen::Array4d cavity_map(const GeneratingFunctions& out_gf, const GeneratingFunctions& in_gf,
                          const Eigen::Array4d& x);

/// Damped synchronous iteration x ← x + damping·(F(x) − x) until max |F(x) − x| ≤ tolerance.
/// Starts from init, with w1 and ŵ1 nudged by ∓1e-6.
/// Non-convergence is reported through `converged`, not thrown.
CavityFixedPoint solve_fixed_point(const DegreeDistribution& p_in, const DegreeDistribution& p_out,
                                   const SolverConfig& cfg = {});

enum class FormulaTag { symmetric_half, symmetric_full, paper_literal };

struct FormulaVariant {
    FormulaTag tag = FormulaTag::symmetric_half;

    /// Coefficient of the ⟨k⟩ correction term.
    double coefficient() const noexcept { return tag == FormulaTag::symmetric_full ? 1.0 : 0.5; }

    friend bool operator==(const FormulaVariant&, const FormulaVariant&) = default;
};

std::string_view to_string(FormulaTag tag);
FormulaVariant parse_variant(std::string_view text);

struct NcDensity {
    double value = 0.0;  ///< clamped to [0, 1]
    double raw = 0.0;
    bool clamped = false;
};

/// Unmatched-node density.
///
/// Symmetric variants:
///   n_d = ½[G(ω̂₂) + G(1−ω̂₁) − 2 + Ĝ(ω₂) + Ĝ(1−ω₁)] + c·k_row·[ω̂₁(1−ω₂) + ω₁(1−ω̂₂)]
/// with G from the out-degree law and Ĝ from the in-degree law.
/// paper_literal evaluates the asymmetric closed form
///   1 − ½[G(ω̂₂) + G(1−ω̂₁) − 1] + [Ĝ(ω₂) + Ĝ(1−ω₁) − 1] + (k_row/2)[ω̂₁(1−ω₂) + ω₁(1−ω̂₂)]
/// as a density, for audit output only.
NcDensity evaluate_nc_density(const DegreeDistribution& p_in, const DegreeDistribution& p_out,
                              const CavityFixedPoint& fp, double k_row, FormulaVariant variant);

struct RankEstimate {
    double n_d = 0.0;
    double n_c = 0.0;
    Index rank_est = 0;
    double r_m = 0.0;
    Index n = 0;
    FormulaVariant variant;
    CavityFixedPoint fixed_point;
    bool clamped = false;
    double literal_n_d = 0.0;  ///< paper_literal density, audit only

    friend bool operator==(const RankEstimate& a, const RankEstimate& b) {
        return a.n_d == b.n_d && a.n_c == b.n_c && a.rank_est == b.rank_est && a.r_m == b.r_m &&
               a.n == b.n && a.variant == b.variant && a.clamped == b.clamped &&
               a.fixed_point.w1 == b.fixed_point.w1 && a.fixed_point.w2 == b.fixed_point.w2 &&
               a.fixed_point.wh1 == b.fixed_point.wh1 && a.fixed_point.wh2 == b.fixed_point.wh2 &&
               a.fixed_point.iterations == b.fixed_point.iterations &&
               a.fixed_point.converged == b.fixed_point.converged;
    }
};

/// Full pipeline: degree sequences → distributions → fixed point → density → rank.
/// A pattern with no entries has n_d = 1 and rank 0.
RankEstimate estimate_rank(const SparsityPattern& p, const SolverConfig& cfg = {},
                           FormulaVariant variant = {});

/// Same math from distributions alone. Throws InconsistentMeans when the means
/// differ by more than 1e-9.
RankEstimate estimate_rank_from_distributions(const DegreeDistribution& p_in,
                                              const DegreeDistribution& p_out, Index n,
                                              const SolverConfig& cfg = {},
                                              FormulaVariant variant = {});

struct CalibrationCell {
    FormulaVariant variant;
    double k = 0.0;
    std::uint64_t seed = 0;
    double cavity_n_d = 0.0;
    double exact_n_d = 0.0;

    double error() const { return cavity_n_d > exact_n_d ? cavity_n_d - exact_n_d : exact_n_d - cavity_n_d; }
};

struct CalibrationReport {
    FormulaVariant winner;
    std::vector<CalibrationCell> cells;
    std::vector<std::pair<FormulaVariant, double>> mean_error;  ///< per candidate variant

    std::string table() const;
};

/// Scores the symmetric-half and symmetric-full variants against exact
/// matching on uniform instances, one per (k, seed), and returns the variant
/// with the smallest mean absolute density error (ties go to symmetric-half).
/// Instances run concurrently.
CalibrationReport calibrate_variant(const std::vector<double>& k_values, Index n,
                                    const std::vector<std::uint64_t>& seeds,
                                    const SolverConfig& cfg = {});

}  // namespace fer
