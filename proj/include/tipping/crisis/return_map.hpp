#pragma once

#include "tipping/dynsys/time_series.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace tipping {

struct ReturnMap {
    std::vector<std::pair<double, double>> pairs;  ///< (m_k, m_{k+1})
};

/// Strict three-point local minima, each refined by the vertex of the
/// parabola through its neighbours.
std::vector<double> local_minima(const std::vector<double>& values);

ReturnMap return_map(const TimeSeries& series, std::size_t coord);

}  // namespace tipping
