#pragma once

#include "tipping/dynsys/time_series.hpp"
#include "tipping/reservoir/hyper_params.hpp"
#include "tipping/util/random.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tipping {

/// Independently seeded reservoirs sharing one set of hyperparameters.
struct EnsembleSpec {
    HyperParams hyper;
    std::size_t members = 1;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  ///< explicit per-member seeds; overrides `seed` when non-empty
    std::size_t threads = 1;

    [[nodiscard]] std::uint64_t member_seed(std::size_t member) const {
        return seeds.empty() ? mix_seed(seed, member) : seeds.at(member);
    }
    void validate() const;
};

/// Warmup segments cut from a pre-critical reference trajectory.
class WarmupPool {
public:
    WarmupPool(TimeSeries reference, std::size_t segment_length);

    [[nodiscard]] TimeSeries draw(Rng& rng) const;
    [[nodiscard]] std::size_t segment_length() const { return segment_length_; }
    [[nodiscard]] const TimeSeries& reference() const { return reference_; }

private:
    TimeSeries reference_;
    std::size_t segment_length_;
};

}  // namespace tipping
