#pragma once

#include "tipping/dynsys/time_series.hpp"

#include <complex>
#include <cstddef>

namespace tipping {

/// Ikeda laser-cavity map z -> mu + gamma z exp(i (kappa - eta / (1 + |z|^2))).
struct IkedaParams {
    double mu = 1.0;     ///< input amplitude (bifurcation parameter)
    double gamma = 0.9;  ///< dissipation
    double kappa = 0.4;  ///< phase constant [rad]
    double eta = 6.0;    ///< nonlinear phase coefficient [rad]

    void validate() const;
};

inline std::complex<double> ikeda_step(std::complex<double> z, const IkedaParams& p) {
    const double phase = p.kappa - p.eta / (1.0 + std::norm(z));
    return p.mu + p.gamma * z * std::polar(1.0, phase);
}

/// Orbit of n samples (Re z, Im z) after discarding `burn_in` iterates; dt = 1.
TimeSeries ikeda_orbit(const IkedaParams& p, std::complex<double> z0, std::size_t n, std::size_t burn_in = 0);

}  // namespace tipping
