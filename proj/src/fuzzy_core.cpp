#include "fit2/fuzzy_core.hpp"
#include "fit2/rng.hpp"

namespace fit2
{

AntecedentGrid random_init_antecedents(std::size_t rules, std::span<const FeatureRange> ranges, std::uint64_t seed,
                                       const AntecedentInit& init)
{
    if (rules == 0 || ranges.empty())
        throw ValidationError("random_init_antecedents: need at least one rule and one input");
    for (const auto& r : ranges)
        if (!std::isfinite(r.min) || !std::isfinite(r.max) || !(r.min < r.max))
            throw ValidationError("random_init_antecedents: degenerate feature range (min >= max)");
    if (!(init.width_min > 0.0) || init.width_max < init.width_min || init.fou_min < 0.0 ||
        init.fou_max < init.fou_min || !(init.fou_max < 1.0))
        throw ValidationError("random_init_antecedents: invalid width or FOU bounds");

    Rng rng(seed);
    std::vector<IT2GaussianMF<double>> mfs;
    mfs.reserve(rules * ranges.size());
    for (std::size_t j = 0; j < rules; ++j) {
        for (const auto& r : ranges) {
            const double span = r.max - r.min;
            const double mean = rng.uniform(r.min, r.max);
            const double width = rng.uniform(init.width_min, init.width_max) * span;
            const double delta = rng.uniform(init.fou_min, init.fou_max);
            mfs.emplace_back(mean, width * (1.0 - delta), width * (1.0 + delta));
        }
    }
    return AntecedentGrid(rules, ranges.size(), std::move(mfs));
}

} // namespace fit2
