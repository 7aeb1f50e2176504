#pragma once

#include "tipping/dynsys/escape.hpp"
#include "tipping/dynsys/time_series.hpp"
#include "tipping/reservoir/reservoir.hpp"

#include <optional>

namespace tipping {

/// Sustained (no lifetime) or collapse at `lifetime` time units.
struct Classification {
    std::optional<double> lifetime;
    bool diverged = false;

    [[nodiscard]] bool collapsed() const { return lifetime.has_value(); }
};

Classification classify(const TimeSeries& series, const EscapeRegion& region, double t_max);

/// A diverged prediction counts as collapse at the divergence time unless it
/// escaped earlier.
Classification classify(const Prediction& prediction, const EscapeRegion& region, double t_max);

/// Closed-loop run of a trained reservoir classified on the fly, without
/// storing the trajectory.
Classification classify_free_run(const Reservoir& reservoir, const TimeSeries& warmup, double b,
                                 const EscapeRegion& region, double t_max);

}  // namespace tipping
