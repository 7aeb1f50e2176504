#include "tipping/crisis/return_map.hpp"

#include "tipping/util/error.hpp"

namespace tipping {

std::vector<double> local_minima(const std::vector<double>& values) {
    std::vector<double> minima;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double left = values[i - 1], mid = values[i], right = values[i + 1];
        if (!(mid < left && mid < right)) continue;
        const double curvature = left - 2.0 * mid + right;
        const double slope = right - left;
        minima.push_back(mid - slope * slope / (8.0 * curvature));
    }
    return minima;
}

ReturnMap return_map(const TimeSeries& series, std::size_t coord) {
    if (coord >= series.dim()) throw config_error("return_map: coordinate out of range");
    if (series.length() < 3) throw data_error("return_map: need at least 3 samples");
    std::vector<double> values(series.length());
    for (std::size_t k = 0; k < values.size(); ++k)
        values[k] = series.states(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(coord));
    const std::vector<double> minima = local_minima(values);
    ReturnMap map;
    for (std::size_t k = 0; k + 1 < minima.size(); ++k) map.pairs.emplace_back(minima[k], minima[k + 1]);
    return map;
}

}  // namespace tipping
