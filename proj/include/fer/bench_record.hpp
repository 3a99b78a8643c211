#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "fer/core.hpp"
#include "fer/gen.hpp"

namespace fer {

enum class Experiment { sweep_n, sweep_k, correlated };
enum class Method { fer, sprank, fieldrank, numrank };

std::string_view to_string(Experiment e);
std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// One timed rank computation; one CSV line.
struct BenchRecord {
    Experiment experiment = Experiment::sweep_n;
    Method method = Method::fer;
    Distribution dist = Distribution::uniform;
    Index n = 0;
    double k_avg = 0.0;
    std::optional<double> gamma;
    WeightMode weight_mode = WeightMode::random_iid;
    std::uint64_t seed = 0;
    Index rank = 0;
    double r_m = 0.0;
    double t_seconds = 0.0;
    std::optional<bool> converged;
};

}  // namespace fer
