#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>

namespace tipping {

/// Advances a state by one sample interval.
using StepFn = std::function<void(Eigen::VectorXd&)>;

struct LyapunovOptions {
    std::size_t steps = 100000;
    std::size_t transient = 1000;  ///< iterates discarded before measuring
    double dt = 1.0;               ///< time per step
    double separation = 1e-8;      ///< renormalized distance between the two trajectories
    std::uint64_t seed = 0;        ///< initial perturbation direction
};

/// Largest Lyapunov exponent per unit time by Benettin's two-trajectory
/// renormalization.
double lyapunov_estimate(const StepFn& step, Eigen::VectorXd x0, const LyapunovOptions& options);

}  // namespace tipping
