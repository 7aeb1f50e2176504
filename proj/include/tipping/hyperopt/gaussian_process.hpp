#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <vector>

namespace tipping {

/// Zero-mean GP with an isotropic squared-exponential kernel on the unit cube.
///
/// Targets are standardized internally. The length scale and the noise-to-signal
/// ratio are chosen by maximizing the marginal likelihood over a fixed grid with
/// the signal variance profiled out; the noise ratio never drops below 1e-6.
class GaussianProcess {
public:
    void fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y);

    struct Posterior {
        double mean = 0.0;
        double variance = 0.0;
    };
    [[nodiscard]] Posterior predict(const Eigen::VectorXd& x) const;

    [[nodiscard]] double length_scale() const { return length_scale_; }
    [[nodiscard]] double noise_ratio() const { return noise_ratio_; }
    [[nodiscard]] bool fitted() const { return !x_.empty(); }

private:
    [[nodiscard]] double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

    std::vector<Eigen::VectorXd> x_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    double length_scale_ = 0.2;
    double noise_ratio_ = 1e-6;
    double signal_var_ = 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd weights_;
};

/// Expected improvement below `best` for a Gaussian posterior.
double expected_improvement(double mean, double sd, double best);

}  // namespace tipping
