#include "tipping/hyperopt/objective.hpp"

#include "tipping/util/error.hpp"
#include "tipping/util/parallel.hpp"
#include "tipping/util/random.hpp"

#include <algorithm>
#include <cmath>

namespace tipping {

void ObjectiveSpec::validate() const {
    if (!(w_short >= 0.0 && w_climate >= 0.0) || (w_short == 0.0 && w_climate == 0.0))
        throw config_error("objective: weights must be non-negative and not both zero");
    if (!(horizon_lyapunov > 0.0)) throw config_error("objective: horizon must be positive");
    if (segments < 1 || warmup < 1 || seeds < 1) throw config_error("objective: segments, warmup and seeds must be positive");
}

std::size_t lyapunov_horizon(double lyapunov_times, double lyapunov, double dt) {
    if (!(lyapunov > 0.0)) throw config_error("objective: Lyapunov exponent must be positive");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(lyapunov_times / (lyapunov * dt))));
}

double normalized_rmse(const TimeSeries& prediction, const TimeSeries& truth, const Eigen::VectorXd& variance) {
    const auto n = static_cast<Eigen::Index>(std::min(prediction.length(), truth.length()));
    if (n == 0) return std::numeric_limits<double>::infinity();
    const Eigen::ArrayXXd diff = (prediction.states.topRows(n) - truth.states.topRows(n)).array();
    const Eigen::ArrayXXd scaled = diff.square().rowwise() / variance.transpose().array();
    return std::sqrt(scaled.mean());
}

double symmetric_relative_error(double a, double b) {
    const double denom = std::abs(a) + std::abs(b);
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

LossBreakdown evaluate_forecaster(const Forecaster& forecaster, const ValidationSet& validation,
                                  const ObjectiveSpec& spec) {
    spec.validate();
    const std::size_t params = validation.series.size();
    if (params == 0) throw config_error("objective: empty validation set");
    LossBreakdown out;

    // Short-term skill.
    double rmse_sum = 0.0;
    for (std::size_t j = 0; j < spec.segments; ++j) {
        const std::size_t p = j % params;
        const std::size_t k = j / params;
        const std::size_t per_param = (spec.segments - p + params - 1) / params;
        const auto& v = validation.series[p];
        const std::size_t horizon = lyapunov_horizon(spec.horizon_lyapunov, v.lyapunov, v.truth.dt);
        if (v.truth.length() < spec.warmup + horizon)
            throw data_error("objective: validation series shorter than warmup + horizon");
        const std::size_t room = v.truth.length() - spec.warmup - horizon;
        const std::size_t offset = room * k / std::max<std::size_t>(per_param, 1);
        const TimeSeries warmup = v.truth.slice(offset, spec.warmup);
        const TimeSeries target = v.truth.slice(offset + spec.warmup, horizon);
        const Eigen::VectorXd variance = v.truth.column_std().array().square().max(1e-300);
        const Prediction pred = forecaster(warmup, v.truth.param, horizon);
        const double e = pred.series.length() < horizon ? spec.escape_penalty : normalized_rmse(pred.series, target, variance);
        rmse_sum += std::min(e, spec.escape_penalty);
    }
    out.short_term = rmse_sum / static_cast<double>(spec.segments);

    // Climate: moments of a long free run against the true continuation.
    double climate_sum = 0.0;
    for (const auto& v : validation.series) {
        if (v.truth.length() <= spec.warmup) throw data_error("objective: validation series shorter than warmup");
        const std::size_t steps = std::min(spec.climate_steps, v.truth.length() - spec.warmup);
        const TimeSeries warmup = v.truth.slice(0, spec.warmup);
        const TimeSeries reference = v.truth.slice(spec.warmup, steps);
        const Prediction pred = forecaster(warmup, v.truth.param, steps);
        const auto escaped = escape_time(pred.series, validation.region, static_cast<double>(steps) * pred.series.dt);
        std::size_t kept = pred.series.length();
        bool penalized = pred.diverged || pred.series.length() < steps;
        if (escaped) {
            kept = static_cast<std::size_t>(std::llround(*escaped / pred.series.dt));
            penalized = true;
        }
        double err = 1.0;
        if (kept >= 2) {
            const TimeSeries run = pred.series.slice(0, kept);
            const Eigen::VectorXd pm = run.column_mean(), ps = run.column_std();
            const Eigen::VectorXd tm = reference.column_mean(), ts = reference.column_std();
            err = 0.0;
            for (Eigen::Index c = 0; c < pm.size(); ++c)
                err += 0.5 * (symmetric_relative_error(pm[c], tm[c]) + symmetric_relative_error(ps[c], ts[c]));
            err /= static_cast<double>(pm.size());
        }
        if (penalized) {
            err += spec.escape_penalty;
            ++out.escapes;
        }
        climate_sum += err;
    }
    out.climate = climate_sum / static_cast<double>(params);
    out.total = spec.w_short * out.short_term + spec.w_climate * out.climate;
    return out;
}

LossBreakdown evaluate(const HyperParams& hyper, const TrainingCorpus& corpus, const ValidationSet& validation,
                       const ObjectiveSpec& spec, std::uint64_t seed, std::size_t threads) {
    spec.validate();
    std::vector<LossBreakdown> parts(spec.seeds);
    parallel_for(spec.seeds, threads, [&](std::size_t s) {
        Reservoir reservoir = Reservoir::build(hyper, corpus.dim(), mix_seed(seed, s));
        reservoir.train(corpus);
        parts[s] = evaluate_forecaster(
            [&](const TimeSeries& warmup, double b, std::size_t steps) { return reservoir.predict(warmup, b, steps); },
            validation, spec);
    });
    LossBreakdown out;
    for (const auto& p : parts) {
        out.short_term += p.short_term;
        out.climate += p.climate;
        out.total += p.total;
        out.escapes += p.escapes;
    }
    const auto n = static_cast<double>(parts.size());
    out.short_term /= n;
    out.climate /= n;
    out.total /= n;
    return out;
}

}  // namespace tipping
