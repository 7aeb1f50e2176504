#include "tipping/dynsys/lyapunov.hpp"

#include "tipping/util/error.hpp"
#include "tipping/util/random.hpp"

#include <cmath>
#include <limits>

namespace tipping {

double lyapunov_estimate(const StepFn& step, Eigen::VectorXd x0, const LyapunovOptions& options) {
    if (options.steps < 1) throw numerical_error("lyapunov_estimate: need at least one step");
    Eigen::VectorXd x = std::move(x0);
    for (std::size_t k = 0; k < options.transient; ++k) step(x);

    Rng rng(options.seed);
    Eigen::VectorXd direction(x.size());
    for (Eigen::Index j = 0; j < direction.size(); ++j) direction[j] = rng.uniform(-1.0, 1.0);
    if (direction.norm() == 0.0) direction.setOnes();
    Eigen::VectorXd y = x + options.separation * direction.normalized();

    double log_sum = 0.0;
    for (std::size_t k = 0; k < options.steps; ++k) {
        step(x);
        step(y);
        const Eigen::VectorXd delta = y - x;
        const double d = delta.norm();
        if (!std::isfinite(d)) throw numerical_error("lyapunov_estimate: trajectory diverged");
        // Trajectories merged exactly: superstable contraction.
        if (d == 0.0) return -std::numeric_limits<double>::infinity();
        log_sum += std::log(d / options.separation);
        direction = delta;
        y = x + (options.separation / d) * delta;
    }
    return log_sum / (static_cast<double>(options.steps) * options.dt);
}

}  // namespace tipping
