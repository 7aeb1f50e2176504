#include "tipping/crisis/classify.hpp"

namespace tipping {

Classification classify(const TimeSeries& series, const EscapeRegion& region, double t_max) {
    return {escape_time(series, region, t_max), false};
}

Classification classify(const Prediction& prediction, const EscapeRegion& region, double t_max) {
    Classification c = classify(prediction.series, region, t_max);
    if (!c.collapsed() && prediction.diverged) {
        const double at = static_cast<double>(prediction.series.length()) * prediction.series.dt;
        if (at <= t_max) c.lifetime = at;
        c.diverged = true;
    }
    return c;
}

Classification classify_free_run(const Reservoir& reservoir, const TimeSeries& warmup, double b,
                                 const EscapeRegion& region, double t_max) {
    EscapeDetector detector(region);
    const std::size_t n = horizon_samples(t_max, warmup.dt);
    const FreeRunResult run = reservoir.free_run(warmup, b, n, [&](const Eigen::VectorXd& x) { return !detector.push(x); });
    Classification c;
    if (detector.escape_index()) {
        c.lifetime = static_cast<double>(*detector.escape_index()) * warmup.dt;
    } else if (run.diverged) {
        c.lifetime = static_cast<double>(run.steps) * warmup.dt;
        c.diverged = true;
    }
    return c;
}

}  // namespace tipping
