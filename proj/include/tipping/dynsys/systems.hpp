#pragma once

#include "tipping/dynsys/escape.hpp"
#include "tipping/dynsys/food_chain.hpp"
#include "tipping/dynsys/ikeda.hpp"
#include "tipping/dynsys/lyapunov.hpp"
#include "tipping/dynsys/time_series.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tipping {

class Rng;

/// Ground-truth system sampled at a fixed interval, with the bifurcation
/// parameter supplied per call.
class TrueSystem {
public:
    virtual ~TrueSystem() = default;

    [[nodiscard]] virtual std::string_view name() const = 0;
    [[nodiscard]] virtual std::size_t dim() const = 0;
    [[nodiscard]] virtual double sample_dt() const = 0;
    [[nodiscard]] virtual std::vector<std::string> coord_names() const = 0;
    [[nodiscard]] virtual Eigen::VectorXd default_initial() const = 0;
    /// Extinction-style rule added to escape regions built for this system.
    [[nodiscard]] virtual std::optional<Floor> floor() const { return std::nullopt; }

    /// Advances x by one sample interval at parameter `param`.
    virtual void advance(Eigen::VectorXd& x, double param) const = 0;

    /// n samples starting after `burn_in` discarded samples; row 0 is the
    /// state reached after the burn-in (x0 itself when burn_in = 0).
    [[nodiscard]] TimeSeries simulate(double param, const Eigen::VectorXd& x0, std::size_t n,
                                      std::size_t burn_in = 0) const;

    /// Escape time from x0 at `param`, or nullopt if it survives t_max.
    [[nodiscard]] std::optional<double> escape_time(double param, const Eigen::VectorXd& x0,
                                                    const EscapeRegion& region, double t_max) const;

    [[nodiscard]] double lyapunov(double param, const Eigen::VectorXd& x0, std::size_t steps,
                                  std::uint64_t seed = 0) const;
};

class IkedaSystem final : public TrueSystem {
public:
    explicit IkedaSystem(IkedaParams base = {}) : base_(base) { base_.validate(); }

    [[nodiscard]] std::string_view name() const override { return "ikeda"; }
    [[nodiscard]] std::size_t dim() const override { return 2; }
    [[nodiscard]] double sample_dt() const override { return 1.0; }
    [[nodiscard]] std::vector<std::string> coord_names() const override { return {"x1", "x2"}; }
    [[nodiscard]] Eigen::VectorXd default_initial() const override { return Eigen::Vector2d(0.5, 0.5); }
    void advance(Eigen::VectorXd& x, double param) const override;

    [[nodiscard]] const IkedaParams& params() const { return base_; }

private:
    IkedaParams base_;
};

/// Food chain integrated with fixed-step RK4 and sampled every `stride` steps.
class FoodChainSystem final : public TrueSystem {
public:
    explicit FoodChainSystem(FoodChainParams base = {}, double step = 0.01, std::size_t stride = 10,
                             double extinction = 1e-4)
        : base_(base), step_(step), stride_(stride), extinction_(extinction) {
        base_.validate();
    }

    [[nodiscard]] std::string_view name() const override { return "foodchain"; }
    [[nodiscard]] std::size_t dim() const override { return 3; }
    [[nodiscard]] double sample_dt() const override { return step_ * static_cast<double>(stride_); }
    [[nodiscard]] std::vector<std::string> coord_names() const override { return {"R", "C", "P"}; }
    [[nodiscard]] Eigen::VectorXd default_initial() const override { return Eigen::Vector3d(0.5, 0.3, 0.8); }
    [[nodiscard]] std::optional<Floor> floor() const override { return Floor{2, extinction_}; }
    void advance(Eigen::VectorXd& x, double param) const override;

    [[nodiscard]] const FoodChainParams& params() const { return base_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] std::size_t stride() const { return stride_; }

private:
    FoodChainParams base_;
    double step_;
    std::size_t stride_;
    double extinction_;
};

/// Escape region for a system: inflated bounding box of `reference` plus the
/// system's floor rule.
EscapeRegion region_for(const TrueSystem& system, const TimeSeries& reference, double inflate = 0.5,
                        std::size_t grace = 10);

/// Initial conditions drawn from an attractor trajectory and perturbed by
/// uniform noise of `noise` times each coordinate's range.
std::vector<Eigen::VectorXd> sample_initial_conditions(const TimeSeries& reference, std::size_t n, double noise,
                                                       Rng& rng);

}  // namespace tipping
