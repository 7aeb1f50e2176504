#include "tipping/hyperopt/gaussian_process.hpp"

#include "tipping/util/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tipping {

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return std::exp(-0.5 * (a - b).squaredNorm() / (length_scale_ * length_scale_));
}

void GaussianProcess::fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y) {
    if (x.empty() || x.size() != y.size()) throw numerical_error("GaussianProcess::fit: need matching non-empty data");
    const auto n = static_cast<Eigen::Index>(x.size());
    x_ = x;
    Eigen::VectorXd targets = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    y_mean_ = targets.mean();
    const double var = (targets.array() - y_mean_).square().mean();
    y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
    targets = (targets.array() - y_mean_) / y_scale_;

    Eigen::MatrixXd sq(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) sq(i, j) = (x_[static_cast<std::size_t>(i)] - x_[static_cast<std::size_t>(j)]).squaredNorm();

    static constexpr double kNoise[] = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 3e-2, 1e-1, 3e-1};
    double best = -std::numeric_limits<double>::infinity();
    for (int li = 0; li < 16; ++li) {
        const double ell = 0.03 * std::pow(100.0, li / 15.0);  // 0.03 .. 3
        for (double g : kNoise) {
            Eigen::MatrixXd k = (-0.5 / (ell * ell) * sq.array()).exp().matrix();
            k.diagonal().array() += g;
            Eigen::LLT<Eigen::MatrixXd> llt(k);
            if (llt.info() != Eigen::Success) continue;
            const Eigen::VectorXd alpha = llt.solve(targets);
            const double quad = targets.dot(alpha);
            const double sigma2 = std::max(quad / static_cast<double>(n), 1e-300);
            const double logdet = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
            const double ll = -0.5 * static_cast<double>(n) * std::log(sigma2) - 0.5 * logdet;
            if (ll > best) {
                best = ll;
                length_scale_ = ell;
                noise_ratio_ = g;
                signal_var_ = sigma2;
                llt_ = llt;
                weights_ = alpha;
            }
        }
    }
    if (!std::isfinite(best)) throw numerical_error("GaussianProcess::fit: no kernel setting was positive definite");
}

GaussianProcess::Posterior GaussianProcess::predict(const Eigen::VectorXd& x) const {
    if (!fitted()) throw numerical_error("GaussianProcess::predict: not fitted");
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k[i] = kernel(x, x_[static_cast<std::size_t>(i)]);
    const double mean = k.dot(weights_);
    const Eigen::VectorXd v = llt_.matrixL().solve(k);
    const double var = std::max(1.0 - v.squaredNorm(), 0.0) * signal_var_;
    return {y_mean_ + y_scale_ * mean, var * y_scale_ * y_scale_};
}

double expected_improvement(double mean, double sd, double best) {
    const double gain = best - mean;
    if (!(sd > 0.0)) return std::max(gain, 0.0);
    const double z = gain / sd;
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    return gain * cdf + sd * pdf;
}

}  // namespace tipping
