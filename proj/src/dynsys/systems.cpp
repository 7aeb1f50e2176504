#include "tipping/dynsys/systems.hpp"

#include "tipping/dynsys/integrate.hpp"
#include "tipping/util/error.hpp"
#include "tipping/util/random.hpp"

#include <cmath>

namespace tipping {

TimeSeries TrueSystem::simulate(double param, const Eigen::VectorXd& x0, std::size_t n, std::size_t burn_in) const {
    if (static_cast<std::size_t>(x0.size()) != dim()) throw config_error("simulate: initial state has wrong dimension");
    Eigen::VectorXd x = x0;
    for (std::size_t k = 0; k < burn_in; ++k) advance(x, param);
    TimeSeries out;
    out.dt = sample_dt();
    out.param = param;
    out.states.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim()));
    for (std::size_t k = 0; k < n; ++k) {
        if (!x.allFinite()) throw numerical_error(std::string(name()) + ": non-finite state at sample " + std::to_string(k));
        out.states.row(static_cast<Eigen::Index>(k)) = x.transpose();
        if (k + 1 < n) advance(x, param);
    }
    return out;
}

std::optional<double> TrueSystem::escape_time(double param, const Eigen::VectorXd& x0, const EscapeRegion& region,
                                              double t_max) const {
    Eigen::VectorXd x = x0;
    bool first = true;
    auto next = [&](Eigen::VectorXd& out) {
        if (!first) advance(x, param);
        first = false;
        out = x;
    };
    return tipping::escape_time(next, dim(), region, sample_dt(), t_max);
}

double TrueSystem::lyapunov(double param, const Eigen::VectorXd& x0, std::size_t steps, std::uint64_t seed) const {
    LyapunovOptions options;
    options.steps = steps;
    options.dt = sample_dt();
    options.seed = seed;
    return lyapunov_estimate([&](Eigen::VectorXd& x) { advance(x, param); }, x0, options);
}

void IkedaSystem::advance(Eigen::VectorXd& x, double param) const {
    IkedaParams p = base_;
    p.mu = param;
    const std::complex<double> z = ikeda_step({x[0], x[1]}, p);
    x[0] = z.real();
    x[1] = z.imag();
}

void FoodChainSystem::advance(Eigen::VectorXd& x, double param) const {
    FoodChainParams p = base_;
    p.K = param;
    auto rhs = [&p](const Eigen::Vector3d& s) { return food_chain_rhs(s, p); };
    Eigen::Vector3d s(x[0], x[1], x[2]);
    for (std::size_t k = 0; k < stride_; ++k) s = rk4_step(rhs, s, step_);
    x = s;
}

EscapeRegion region_for(const TrueSystem& system, const TimeSeries& reference, double inflate, std::size_t grace) {
    EscapeRegion region = EscapeRegion::around(reference, inflate, grace);
    region.floor = system.floor();
    region.validate();
    return region;
}

std::vector<Eigen::VectorXd> sample_initial_conditions(const TimeSeries& reference, std::size_t n, double noise,
                                                       Rng& rng) {
    if (reference.length() == 0) throw data_error("sample_initial_conditions: empty reference");
    const Eigen::VectorXd range = reference.column_max() - reference.column_min();
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd x = reference.sample(rng.below(reference.length()));
        for (Eigen::Index j = 0; j < x.size(); ++j) x[j] += noise * range[j] * rng.uniform(-1.0, 1.0);
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace tipping
