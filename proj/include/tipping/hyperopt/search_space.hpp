#pragma once

#include "tipping/reservoir/hyper_params.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace tipping {

struct Dimension {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
};

/// Axis-aligned box searched by the optimizer.
struct SearchSpace {
    std::vector<Dimension> dims;

    /// avg_degree, rho, sigma_in, k_b, b0, alpha, log_beta.
    static SearchSpace reservoir_default();

    void validate() const;
    [[nodiscard]] std::size_t size() const { return dims.size(); }
    [[nodiscard]] bool contains(const Eigen::VectorXd& point) const;
    [[nodiscard]] Eigen::VectorXd to_unit(const Eigen::VectorXd& point) const;
    [[nodiscard]] Eigen::VectorXd from_unit(const Eigen::VectorXd& unit) const;
};

/// Overwrites the seven tunable fields of `base` from a point of reservoir_default().
HyperParams to_hyper(const Eigen::VectorXd& point, HyperParams base);
Eigen::VectorXd from_hyper(const HyperParams& hyper);

}  // namespace tipping
