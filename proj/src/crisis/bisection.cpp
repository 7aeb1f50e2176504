#include "tipping/crisis/bisection.hpp"

#include "tipping/util/error.hpp"

namespace tipping {

std::string_view to_string(BisectionFlag flag) {
    switch (flag) {
        case BisectionFlag::none: return "none";
        case BisectionFlag::saturated_low: return "saturated-low";
        case BisectionFlag::saturated_high: return "saturated-high";
    }
    return "none";
}

BisectionResult bisect_transition(const std::function<bool(double)>& collapses, double lo, double hi,
                                  double resolution) {
    if (!(lo < hi)) throw config_error("bisection: need b_lo < b_hi");
    if (!(resolution > 0.0)) throw config_error("bisection: resolution must be positive");
    BisectionResult result;
    result.lo = lo;
    result.hi = hi;
    ++result.evaluations;
    if (collapses(lo)) {
        result.estimate = lo;
        result.flag = BisectionFlag::saturated_low;
        result.hi = lo;
        return result;
    }
    ++result.evaluations;
    if (!collapses(hi)) {
        result.estimate = hi;
        result.flag = BisectionFlag::saturated_high;
        result.lo = hi;
        return result;
    }
    while (result.hi - result.lo > resolution) {
        const double mid = 0.5 * (result.lo + result.hi);
        ++result.evaluations;
        if (collapses(mid)) {
            result.hi = mid;
        } else {
            result.lo = mid;
        }
    }
    result.estimate = 0.5 * (result.lo + result.hi);
    return result;
}

}  // namespace tipping
