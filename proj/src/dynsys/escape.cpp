#include "tipping/dynsys/escape.hpp"

#include "tipping/util/error.hpp"

#include <cmath>

namespace tipping {

void EscapeRegion::validate() const {
    if (lower.size() == 0 || lower.size() != upper.size()) throw config_error("escape region: bound sizes differ");
    if (!(lower.array() < upper.array()).all()) throw config_error("escape region: lower must be below upper");
    if (grace < 1) throw config_error("escape region: grace must be at least 1");
    if (floor && floor->coord >= static_cast<std::size_t>(lower.size()))
        throw config_error("escape region: floor coordinate out of range");
}

bool EscapeRegion::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    // NaN fails both comparisons, so non-finite samples count as outside.
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
    }
    if (floor && !(x[static_cast<Eigen::Index>(floor->coord)] >= floor->threshold)) return false;
    return true;
}

EscapeRegion EscapeRegion::around(const TimeSeries& reference, double inflate, std::size_t grace) {
    const Eigen::VectorXd lo = reference.column_min();
    const Eigen::VectorXd hi = reference.column_max();
    const Eigen::VectorXd center = 0.5 * (lo + hi);
    const Eigen::VectorXd half = 0.5 * (hi - lo) * (1.0 + inflate);
    EscapeRegion region{center - half, center + half, grace, std::nullopt};
    region.validate();
    return region;
}

bool EscapeDetector::push(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (escaped_) return true;
    const std::size_t k = seen_++;
    if (region_->contains(x)) {
        run_ = 0;
        return false;
    }
    if (++run_ >= region_->grace) {
        escaped_ = k + 1 - run_;
        return true;
    }
    return false;
}

std::size_t horizon_samples(double t_max, double dt) {
    return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
}

std::optional<double> escape_time(const TimeSeries& series, const EscapeRegion& region, double t_max) {
    EscapeDetector detector(region);
    const std::size_t n = std::min(series.length(), horizon_samples(t_max, series.dt));
    for (std::size_t k = 0; k < n; ++k) {
        if (detector.push(series.states.row(static_cast<Eigen::Index>(k)).transpose()))
            return static_cast<double>(*detector.escape_index()) * series.dt;
    }
    return std::nullopt;
}

}  // namespace tipping
