#pragma once

#include <cstddef>

namespace tipping {

/// Reservoir hyperparameters. The seven tunable quantities are avg_degree,
/// spectral_radius, sigma_in, k_b, b0, alpha and beta; n_nodes is structural.
struct HyperParams {
    std::size_t n_nodes = 1000;
    double avg_degree = 6.0;
    double spectral_radius = 0.8;
    double sigma_in = 1.0;  ///< W_in entries ~ U[-sigma_in, sigma_in]
    double k_b = 1.0;       ///< parameter-channel gain
    double b0 = 0.0;        ///< parameter-channel offset
    double alpha = 1.0;     ///< leak rate in (0, 1]
    double beta = 1e-6;     ///< ridge regularization

    void validate() const;

    bool operator==(const HyperParams&) const = default;
};

}  // namespace tipping
