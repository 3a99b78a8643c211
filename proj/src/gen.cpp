#include "fer/gen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "fer/error.hpp"
#include "fer/rng.hpp"

namespace fer {

namespace {

constexpr std::uint64_t kPatternStream = 1;
constexpr std::uint64_t kWeightStream = 2;
constexpr std::uint64_t kWeightGrid = 1'000'000'000'000ULL;

std::uint64_t key_of(Index row, Index col, Index n) {
    return static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(n) +
           static_cast<std::uint64_t>(col);
}

/// Mean of the zeta law truncated to [lo, hi].
double truncated_mean(Index lo, Index hi, double gamma) {
    double z = 0.0, m = 0.0;
    for (Index k = lo; k <= hi; ++k) {
        const double w = std::pow(static_cast<double>(k), -gamma);
        z += w;
        m += static_cast<double>(k) * w;
    }
    return m / z;
}

std::vector<double> truncated_law(Index lo, Index hi, double gamma) {
    std::vector<double> p(static_cast<std::size_t>(hi) + 1, 0.0);
    double z = 0.0;
    for (Index k = lo; k <= hi; ++k) z += p[k] = std::pow(static_cast<double>(k), -gamma);
    for (double& x : p) x /= z;
    return p;
}

class DegreeSampler {
public:
    explicit DegreeSampler(const std::vector<double>& probs) {
        cdf_.resize(probs.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) cdf_[k] = acc += probs[k];
        cdf_.back() = 1.0;
    }

    Index operator()(Rng& rng) const {
        const double u = rng.unit();
        return static_cast<Index>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

/// Draws n degrees, then resamples single nodes until the sum equals `target`,
/// accepting a redraw only when it moves the sum closer.
std::vector<Index> sample_degrees(const DegreeSampler& sample, Index n, Index target, Rng& rng) {
    std::vector<Index> seq(static_cast<std::size_t>(n));
    Index sum = 0;
    for (auto& k : seq) sum += k = sample(rng);
    const std::uint64_t limit = 1000 * static_cast<std::uint64_t>(n) + 100000;
    for (std::uint64_t it = 0; sum != target; ++it) {
        if (it > limit) throw InfeasibleSpec("could not repair degree sequence to the target sum");
        const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
        const Index k = sample(rng);
        const Index next = sum - seq[i] + k;
        if (std::abs(target - next) < std::abs(target - sum)) {
            sum = next;
            seq[i] = k;
        }
    }
    return seq;
}

}  // namespace

std::string_view to_string(Distribution dist) {
    return dist == Distribution::uniform ? "uniform" : "powerlaw";
}

Distribution parse_distribution(std::string_view text) {
    if (text == "uniform" || text == "random") return Distribution::uniform;
    if (text == "powerlaw" || text == "power-law") return Distribution::powerlaw;
    throw Error("unknown distribution '" + std::string(text) + "'");
}

void validate(const GenSpec& spec) {
    if (spec.n < 1) throw InfeasibleSpec("n must be >= 1");
    if (!(spec.k_avg > 0.0) || spec.k_avg > static_cast<double>(spec.n))
        throw InfeasibleSpec("k_avg must lie in (0, n], got " + std::to_string(spec.k_avg));
    if (spec.dist == Distribution::powerlaw && !(spec.gamma > 2.0))
        throw InfeasibleSpec("gamma must exceed 2");
    if (spec.weight_mode == WeightMode::external)
        throw InfeasibleSpec("generators support random-iid and all-ones weights only");
}

WeightedSparseMatrix assign_weights(const SparsityPattern& p, WeightMode mode, std::uint64_t seed) {
    std::vector<double> values(p.nnz(), 1.0);
    if (mode == WeightMode::random_iid) {
        Rng rng(seed);
        for (double& v : values)
            v = static_cast<double>(rng.between(1, kWeightGrid)) / static_cast<double>(kWeightGrid);
    } else if (mode != WeightMode::all_ones) {
        throw Error("assign_weights supports random-iid and all-ones");
    }
    return WeightedSparseMatrix(p, std::move(values), mode);
}

WeightedSparseMatrix gen_uniform(const GenSpec& spec) {
    validate(spec);
    const auto n = static_cast<std::uint64_t>(spec.n);
    const std::uint64_t grid = n * n;
    const auto target = static_cast<std::uint64_t>(std::llround(static_cast<double>(spec.n) * spec.k_avg));
    if (target > grid) throw InfeasibleSpec("requested nnz exceeds n^2");

    // Floyd's sampling without replacement.
    Rng rng(derive_seed(spec.seed, kPatternStream));
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(target));
    for (std::uint64_t j = grid - target; j < grid; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> keys(chosen.begin(), chosen.end());
    std::sort(keys.begin(), keys.end());
    std::vector<Entry> entries;
    entries.reserve(keys.size());
    for (auto k : keys) entries.push_back({static_cast<Index>(k / n), static_cast<Index>(k % n)});
    return assign_weights(SparsityPattern(spec.n, std::move(entries)), spec.weight_mode,
                          derive_seed(spec.seed, kWeightStream));
}

PowerLawDegreeLaw powerlaw_degree_law(Index n, double k_avg, double gamma) {
    if (!(gamma > 2.0)) throw InfeasibleSpec("gamma must exceed 2");
    const auto k_max = std::max<Index>(1, static_cast<Index>(std::floor(std::sqrt(static_cast<double>(n)))));
    const double lowest = truncated_mean(1, k_max, gamma);
    if (k_avg < lowest - 1e-12 || k_avg > static_cast<double>(k_max) + 1e-12)
        throw InfeasibleSpec("k_avg=" + std::to_string(k_avg) + " unreachable for gamma=" +
                             std::to_string(gamma) + ", n=" + std::to_string(n) + " (range [" +
                             std::to_string(lowest) + ", " + std::to_string(k_max) + "])");

    PowerLawDegreeLaw law;
    law.k_max = k_max;
    Index k_min = 1;
    while (k_min < k_max && truncated_mean(k_min + 1, k_max, gamma) < k_avg) ++k_min;
    law.k_min = k_min;
    const double lo = truncated_mean(k_min, k_max, gamma);
    std::vector<double> base = truncated_law(k_min, k_max, gamma);
    if (k_min < k_max) {
        const double hi = truncated_mean(k_min + 1, k_max, gamma);
        law.mix = std::clamp((k_avg - lo) / (hi - lo), 0.0, 1.0);
        const std::vector<double> upper = truncated_law(k_min + 1, k_max, gamma);
        for (std::size_t k = 0; k < base.size(); ++k)
            base[k] = (1.0 - law.mix) * base[k] + law.mix * upper[k];
    }
    law.probs = std::move(base);
    for (std::size_t k = 0; k < law.probs.size(); ++k)
        law.mean += static_cast<double>(k) * law.probs[k];
    return law;
}

WeightedSparseMatrix gen_powerlaw(const GenSpec& spec) {
    validate(spec);
    const PowerLawDegreeLaw law = powerlaw_degree_law(spec.n, spec.k_avg, spec.gamma);
    const Index n = spec.n;
    const auto target = static_cast<Index>(std::llround(static_cast<double>(n) * spec.k_avg));
    if (target < law.k_min * n || target > law.k_max * n)
        throw InfeasibleSpec("target nnz incompatible with the degree range");

    Rng rng(derive_seed(spec.seed, kPatternStream));
    const DegreeSampler sampler(law.probs);
    const auto row_deg = sample_degrees(sampler, n, target, rng);
    const auto col_deg = sample_degrees(sampler, n, target, rng);

    std::vector<Index> row_stubs, col_stubs;
    row_stubs.reserve(static_cast<std::size_t>(target));
    col_stubs.reserve(static_cast<std::size_t>(target));
    for (Index i = 0; i < n; ++i) {
        row_stubs.insert(row_stubs.end(), static_cast<std::size_t>(row_deg[i]), i);
        col_stubs.insert(col_stubs.end(), static_cast<std::size_t>(col_deg[i]), i);
    }
    for (std::size_t i = col_stubs.size(); i > 1; --i)
        std::swap(col_stubs[i - 1], col_stubs[rng.below(i)]);

    // Pair stubs; a pair that repeats a position swaps its column stub with a
    // random other pair until both resulting positions are new.
    const std::size_t L = row_stubs.size();
    std::unordered_set<std::uint64_t> placed;
    placed.reserve(L);
    std::vector<char> accepted(L, 0);
    std::vector<std::size_t> pending;
    for (std::size_t e = 0; e < L; ++e) {
        if (placed.insert(key_of(row_stubs[e], col_stubs[e], n)).second) accepted[e] = 1;
        else pending.push_back(e);
    }
    std::uint64_t attempts = 0;
    const std::uint64_t budget = 100 * static_cast<std::uint64_t>(L);
    for (std::size_t e : pending) {
        while (!accepted[e]) {
            if (++attempts > budget) throw InfeasibleSpec("configuration-model pairing failed");
            const std::size_t f = rng.below(L);
            if (f == e) continue;
            const auto a = key_of(row_stubs[e], col_stubs[f], n);
            const auto b = key_of(row_stubs[f], col_stubs[e], n);
            if (a == b) continue;
            const auto old_f = key_of(row_stubs[f], col_stubs[f], n);
            if (accepted[f]) placed.erase(old_f);
            if (placed.count(a) || placed.count(b)) {
                if (accepted[f]) placed.insert(old_f);
                continue;
            }
            std::swap(col_stubs[e], col_stubs[f]);
            placed.insert(a);
            placed.insert(b);
            accepted[e] = accepted[f] = 1;
        }
    }

    std::vector<std::uint64_t> keys;
    keys.reserve(L);
    for (std::size_t e = 0; e < L; ++e) keys.push_back(key_of(row_stubs[e], col_stubs[e], n));
    std::sort(keys.begin(), keys.end());
    std::vector<Entry> entries;
    entries.reserve(L);
    const auto un = static_cast<std::uint64_t>(n);
    for (auto k : keys) entries.push_back({static_cast<Index>(k / un), static_cast<Index>(k % un)});
    return assign_weights(SparsityPattern(n, std::move(entries)), spec.weight_mode,
                          derive_seed(spec.seed, kWeightStream));
}

WeightedSparseMatrix generate(const GenSpec& spec) {
    return spec.dist == Distribution::uniform ? gen_uniform(spec) : gen_powerlaw(spec);
}

}  // namespace fer
