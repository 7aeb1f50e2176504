#pragma once

#include "tipping/dynsys/escape.hpp"
#include "tipping/dynsys/time_series.hpp"
#include "tipping/reservoir/reservoir.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace tipping {

/// Weights and sizes of the tuning loss.
struct ObjectiveSpec {
    double w_short = 1.0;
    double w_climate = 1.0;
    double horizon_lyapunov = 5.0;  ///< short-term horizon in Lyapunov times
    std::size_t segments = 20;      ///< validation segments, spread over the parameter values
    std::size_t warmup = 1000;      ///< synchronization samples before each forecast
    std::size_t climate_steps = 100000;
    double escape_penalty = 10.0;
    std::size_t seeds = 3;          ///< reservoir realizations averaged per evaluation

    void validate() const;
};

/// Held-out truth at one training parameter value.
struct ValidationSeries {
    TimeSeries truth;
    double lyapunov = 1.0;  ///< largest exponent per unit time; sets the horizon
};

struct ValidationSet {
    std::vector<ValidationSeries> series;
    EscapeRegion region;
};

struct LossBreakdown {
    double short_term = 0.0;  ///< mean normalized RMSE over segments
    double climate = 0.0;     ///< mean symmetric moment error plus escape penalties
    double total = 0.0;
    std::size_t escapes = 0;
};

/// Closed-loop forecaster: (warmup, parameter, steps) -> prediction.
using Forecaster = std::function<Prediction(const TimeSeries& warmup, double b, std::size_t steps)>;

/// Forecast horizon in samples for `lyapunov_times` at exponent `lyapunov`.
std::size_t lyapunov_horizon(double lyapunov_times, double lyapunov, double dt);

/// sqrt(mean over samples and coordinates of (pred - truth)^2 / var_j) over the
/// common prefix; var_j is the variance of `scale_from`.
double normalized_rmse(const TimeSeries& prediction, const TimeSeries& truth, const Eigen::VectorXd& variance);

/// |a - b| / (|a| + |b|), zero when both vanish.
double symmetric_relative_error(double a, double b);

LossBreakdown evaluate_forecaster(const Forecaster& forecaster, const ValidationSet& validation,
                                  const ObjectiveSpec& spec);

/// Loss of `hyper` averaged over spec.seeds reservoirs trained on `corpus`.
LossBreakdown evaluate(const HyperParams& hyper, const TrainingCorpus& corpus, const ValidationSet& validation,
                       const ObjectiveSpec& spec, std::uint64_t seed, std::size_t threads = 1);

}  // namespace tipping
