#pragma once

#include <Eigen/Core>

namespace tipping {

/// Resource-consumer-predator chain with saturating functional responses.
/// Defaults put the boundary crisis near K = 0.99976.
struct FoodChainParams {
    double K = 0.98;
    double x_c = 0.4;
    double y_c = 2.009;
    double x_p = 0.08;
    double y_p = 2.876;
    double R0 = 0.16129;
    double C0 = 0.5;

    void validate() const;
};

/// Time derivative of (R, C, P).
inline Eigen::Vector3d food_chain_rhs(const Eigen::Vector3d& s, const FoodChainParams& p) {
    const double R = s[0], C = s[1], P = s[2];
    const double consumption = R / (R + p.R0);
    const double predation = C / (C + p.C0);
    return {R * (1.0 - R / p.K) - p.x_c * p.y_c * C * consumption,
            p.x_c * C * (p.y_c * consumption - 1.0) - p.x_p * p.y_p * P * predation,
            p.x_p * P * (p.y_p * predation - 1.0)};
}

}  // namespace tipping
