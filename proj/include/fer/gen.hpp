#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "fer/core.hpp"

namespace fer {

enum class Distribution { uniform, powerlaw };

std::string_view to_string(Distribution dist);
Distribution parse_distribution(std::string_view text);

struct GenSpec {
    Index n = 1;
    double k_avg = 1.0;  ///< target nonzeros per row
    Distribution dist = Distribution::uniform;
    double gamma = 3.0;  ///< power-law exponent, used iff dist == powerlaw
    WeightMode weight_mode = WeightMode::random_iid;
    std::uint64_t seed = 0;
};

/// Throws InfeasibleSpec unless n >= 1, 0 < k_avg <= n and gamma > 2.
void validate(const GenSpec& spec);

/// Exactly round(n·k_avg) distinct positions drawn uniformly from the n×n grid,
/// returned in row-major order.
WeightedSparseMatrix gen_uniform(const GenSpec& spec);

/// Configuration-model matrix whose row and column degrees follow a truncated
/// power law P(k) ∝ k^-gamma on [k_min, floor(sqrt(n))].
WeightedSparseMatrix gen_powerlaw(const GenSpec& spec);

/// Dispatches on spec.dist.
WeightedSparseMatrix generate(const GenSpec& spec);

/// Random-iid values are m / 10^12 for m uniform in [1, 10^12], i.e. uniform on
/// a 12-digit grid in (0, 1]; this keeps them exactly representable for field_rank.
WeightedSparseMatrix assign_weights(const SparsityPattern& p, WeightMode mode, std::uint64_t seed);

/// Degree law used by gen_powerlaw: a mixture of the zeta laws truncated to
/// [k_min, k_max] and [k_min + 1, k_max] whose mean equals the target.
struct PowerLawDegreeLaw {
    Index k_min = 1;
    Index k_max = 1;
    double mix = 0.0;            ///< weight of the [k_min + 1, k_max] component
    std::vector<double> probs;   ///< indexed by degree, zero below k_min
    double mean = 0.0;
};

PowerLawDegreeLaw powerlaw_degree_law(Index n, double k_avg, double gamma);

}  // namespace fer
