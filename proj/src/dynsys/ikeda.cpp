#include "tipping/dynsys/ikeda.hpp"

#include "tipping/util/error.hpp"

#include <cmath>

namespace tipping {

void IkedaParams::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(kappa)) throw config_error("ikeda: mu and kappa must be finite");
    if (!(gamma > 0.0 && gamma < 1.0)) throw config_error("ikeda: gamma must lie in (0, 1)");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw config_error("ikeda: eta must be positive");
}

TimeSeries ikeda_orbit(const IkedaParams& p, std::complex<double> z0, std::size_t n, std::size_t burn_in) {
    std::complex<double> z = z0;
    for (std::size_t k = 0; k < burn_in; ++k) z = ikeda_step(z, p);
    TimeSeries out;
    out.dt = 1.0;
    out.param = p.mu;
    out.states.resize(static_cast<Eigen::Index>(n), 2);
    for (std::size_t k = 0; k < n; ++k) {
        out.states(static_cast<Eigen::Index>(k), 0) = z.real();
        out.states(static_cast<Eigen::Index>(k), 1) = z.imag();
        z = ikeda_step(z, p);
    }
    return out;
}

}  // namespace tipping
