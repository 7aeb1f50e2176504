#include "tipping/dynsys/food_chain.hpp"

#include "tipping/util/error.hpp"

#include <cmath>

namespace tipping {

void FoodChainParams::validate() const {
    for (double v : {K, x_c, y_c, x_p, y_p, R0, C0}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw config_error("foodchain: all parameters must be strictly positive");
    }
}

}  // namespace tipping
