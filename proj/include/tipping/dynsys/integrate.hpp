#pragma once

#include "tipping/dynsys/time_series.hpp"
#include "tipping/util/error.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>

namespace tipping {

/// One classical fourth-order Runge-Kutta step.
template <class State, class Rhs>
State rk4_step(const Rhs& rhs, const State& x, double dt) {
    const State k1 = rhs(x);
    const State k2 = rhs(State(x + 0.5 * dt * k1));
    const State k3 = rhs(State(x + 0.5 * dt * k2));
    const State k4 = rhs(State(x + dt * k3));
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step RK4 over n steps, recording x0 and then every `stride`-th state.
/// The returned series has dt = dt * stride. A non-finite state raises a
/// numerical error naming the offending step.
template <class Rhs>
TimeSeries integrate(const Rhs& rhs, const Eigen::VectorXd& x0, double dt, std::size_t n, std::size_t stride = 1,
                     double param = 0.0) {
    if (!(dt > 0.0)) throw numerical_error("integrate: dt must be positive");
    if (n < 1 || stride < 1) throw numerical_error("integrate: need n >= 1 and stride >= 1");
    TimeSeries out;
    out.dt = dt * static_cast<double>(stride);
    out.param = param;
    out.states.resize(static_cast<Eigen::Index>(n / stride + 1), x0.size());
    out.states.row(0) = x0.transpose();
    Eigen::VectorXd x = x0;
    Eigen::Index row = 1;
    for (std::size_t step = 1; step <= n; ++step) {
        x = rk4_step(rhs, x, dt);
        if (!x.allFinite()) throw numerical_error("integrate: non-finite state at step " + std::to_string(step));
        if (step % stride == 0) out.states.row(row++) = x.transpose();
    }
    return out;
}

}  // namespace tipping
