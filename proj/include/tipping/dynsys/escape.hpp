#pragma once

#include "tipping/dynsys/time_series.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>

namespace tipping {

/// A coordinate that must stay above `threshold` (extinction rule).
struct Floor {
    std::size_t coord = 0;
    double threshold = 0.0;
};

/// Normal-operation box. A sample is "out" when it is non-finite, outside
/// [lower, upper], or below the optional floor; escape is declared after
/// `grace` consecutive out samples.
struct EscapeRegion {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::size_t grace = 10;
    std::optional<Floor> floor;

    void validate() const;
    [[nodiscard]] bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// Bounding box of `reference` inflated by `inflate` (fraction of the
    /// half-width) about its center.
    static EscapeRegion around(const TimeSeries& reference, double inflate = 0.5, std::size_t grace = 10);
};

/// Streaming escape detector; feed samples in order.
class EscapeDetector {
public:
    explicit EscapeDetector(const EscapeRegion& region) : region_(&region) {}

    /// Returns true once escape has been confirmed (and keeps returning true).
    bool push(const Eigen::Ref<const Eigen::VectorXd>& x);

    /// Index of the first sample of the confirmed out-of-region run.
    [[nodiscard]] std::optional<std::size_t> escape_index() const { return escaped_; }
    [[nodiscard]] std::size_t samples_seen() const { return seen_; }

private:
    const EscapeRegion* region_;
    std::size_t seen_ = 0;
    std::size_t run_ = 0;
    std::optional<std::size_t> escaped_;
};

/// Number of samples inspected for a horizon t_max at spacing dt (indices k with k*dt <= t_max).
std::size_t horizon_samples(double t_max, double dt);

/// Escape time of a recorded series (index * dt), or nullopt if it survives t_max.
std::optional<double> escape_time(const TimeSeries& series, const EscapeRegion& region, double t_max);

/// Escape time for a sample generator: `next(x)` writes sample k into x,
/// starting at k = 0.
template <class Source>
std::optional<double> escape_time(Source&& next, std::size_t dim, const EscapeRegion& region, double dt, double t_max) {
    EscapeDetector detector(region);
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    const std::size_t n = horizon_samples(t_max, dt);
    for (std::size_t k = 0; k < n; ++k) {
        next(x);
        if (detector.push(x)) return static_cast<double>(*detector.escape_index()) * dt;
    }
    return std::nullopt;
}

}  // namespace tipping
