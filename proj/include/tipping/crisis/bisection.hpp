#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

namespace tipping {

enum class BisectionFlag { none, saturated_low, saturated_high };

std::string_view to_string(BisectionFlag flag);

struct BisectionResult {
    double estimate = 0.0;
    BisectionFlag flag = BisectionFlag::none;
    double lo = 0.0;  ///< final bracket: lo sustained, hi collapses
    double hi = 0.0;
    std::size_t evaluations = 0;
};

/// Locates the sustained/collapse boundary of `collapses` on [lo, hi] to
/// within `resolution`. If lo already collapses the estimate is lo
/// (saturated-low); if hi is still sustained it is hi (saturated-high).
BisectionResult bisect_transition(const std::function<bool(double)>& collapses, double lo, double hi,
                                  double resolution);

}  // namespace tipping
