#include "tipping/hyperopt/search_space.hpp"

#include "tipping/util/error.hpp"

#include <algorithm>
#include <cmath>

namespace tipping {

SearchSpace SearchSpace::reservoir_default() {
    return {{{"avg_degree", 1.0, 20.0},
             {"rho", 0.1, 2.0},
             {"sigma_in", 0.01, 3.0},
             {"k_b", 0.0, 3.0},
             {"b0", -3.0, 3.0},
             {"alpha", 0.01, 1.0},
             {"log_beta", -10.0, -1.0}}};
}

void SearchSpace::validate() const {
    if (dims.empty()) throw config_error("search space: no dimensions");
    for (const auto& d : dims) {
        if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || !(d.lower < d.upper))
            throw config_error("search space: bad bounds for " + d.name);
    }
}

bool SearchSpace::contains(const Eigen::VectorXd& point) const {
    if (static_cast<std::size_t>(point.size()) != dims.size()) return false;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const double v = point[static_cast<Eigen::Index>(i)];
        if (!(v >= dims[i].lower && v <= dims[i].upper)) return false;
    }
    return true;
}

Eigen::VectorXd SearchSpace::to_unit(const Eigen::VectorXd& point) const {
    Eigen::VectorXd u(point.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        u[k] = (point[k] - dims[i].lower) / (dims[i].upper - dims[i].lower);
    }
    return u;
}

Eigen::VectorXd SearchSpace::from_unit(const Eigen::VectorXd& unit) const {
    Eigen::VectorXd p(unit.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const double clamped = std::clamp(unit[k], 0.0, 1.0);
        p[k] = dims[i].lower + clamped * (dims[i].upper - dims[i].lower);
    }
    return p;
}

HyperParams to_hyper(const Eigen::VectorXd& point, HyperParams base) {
    if (point.size() != 7) throw config_error("to_hyper: expected a 7-dimensional point");
    base.avg_degree = std::min(point[0], static_cast<double>(base.n_nodes));
    base.spectral_radius = point[1];
    base.sigma_in = point[2];
    base.k_b = point[3];
    base.b0 = point[4];
    base.alpha = point[5];
    base.beta = std::pow(10.0, point[6]);
    return base;
}

Eigen::VectorXd from_hyper(const HyperParams& h) {
    Eigen::VectorXd p(7);
    p << h.avg_degree, h.spectral_radius, h.sigma_in, h.k_b, h.b0, h.alpha, std::log10(h.beta);
    return p;
}

}  // namespace tipping
