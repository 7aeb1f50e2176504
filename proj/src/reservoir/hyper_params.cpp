#include "tipping/reservoir/hyper_params.hpp"

#include "tipping/util/error.hpp"

#include <cmath>

namespace tipping {

void HyperParams::validate() const {
    if (n_nodes < 1) throw config_error("hyper: n_nodes must be at least 1");
    if (!(avg_degree > 0.0 && avg_degree <= static_cast<double>(n_nodes)))
        throw config_error("hyper: avg_degree must lie in (0, n_nodes]");
    if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius))
        throw config_error("hyper: spectral_radius must be positive");
    if (!(sigma_in >= 0.0) || !std::isfinite(sigma_in)) throw config_error("hyper: sigma_in must be non-negative");
    if (!std::isfinite(k_b) || !std::isfinite(b0)) throw config_error("hyper: k_b and b0 must be finite");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw config_error("hyper: alpha must lie in (0, 1]");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw config_error("hyper: beta must be non-negative");
}

}  // namespace tipping
