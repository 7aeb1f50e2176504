#include "tipping/crisis/lifetimes.hpp"

#include "tipping/crisis/classify.hpp"
#include "tipping/util/error.hpp"
#include "tipping/util/parallel.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>

namespace tipping {

void LifetimeSamples::add(const LifetimeRecord& record) {
    records.push_back(record);
    if (record.censored) {
        ++censored;
    } else {
        lifetimes.push_back(record.lifetime);
    }
}

LifetimeSamples pool_samples(const std::vector<LifetimeSamples>& parts) {
    LifetimeSamples out;
    for (const auto& p : parts) {
        if (out.records.empty() && out.lifetimes.empty() && out.censored == 0) {
            out.horizon = p.horizon;
        } else if (p.horizon != out.horizon) {
            throw data_error("pool_samples: sample sets have different horizons");
        }
        out.lifetimes.insert(out.lifetimes.end(), p.lifetimes.begin(), p.lifetimes.end());
        out.records.insert(out.records.end(), p.records.begin(), p.records.end());
        out.censored += p.censored;
    }
    return out;
}

ExponentialFit fit_exponential(const LifetimeSamples& samples, ShiftMode shift) {
    const auto& x = samples.lifetimes;
    if (x.size() < 10)
        throw Error(ErrorKind::all_censored,
                    "fit_exponential: need at least 10 uncensored lifetimes, have " + std::to_string(x.size()));
    ExponentialFit fit;
    fit.n = x.size();
    fit.shift = shift == ShiftMode::min_observed ? *std::min_element(x.begin(), x.end()) : 0.0;
    double sum = 0.0;
    for (double v : x) sum += v - fit.shift;
    fit.tau = sum / static_cast<double>(fit.n);
    // 2 n tau_hat / tau ~ chi^2(2n)
    const boost::math::chi_squared chi2(2.0 * static_cast<double>(fit.n));
    const double scaled = 2.0 * static_cast<double>(fit.n) * fit.tau;
    fit.ci_low = scaled / boost::math::quantile(chi2, 0.975);
    fit.ci_high = scaled / boost::math::quantile(chi2, 0.025);
    return fit;
}

std::vector<SurvivalRow> survival_table(const LifetimeSamples& samples, std::size_t bins) {
    std::vector<SurvivalRow> table;
    const std::size_t total = samples.lifetimes.size() + samples.censored;
    if (total == 0 || bins == 0) return table;
    std::vector<double> sorted = samples.lifetimes;
    std::sort(sorted.begin(), sorted.end());
    const double end = sorted.empty() ? samples.horizon : sorted.back();
    for (std::size_t k = 0; k <= bins; ++k) {
        const double t = end * static_cast<double>(k) / static_cast<double>(bins);
        const auto dead = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
        const std::size_t alive = total - dead;
        table.push_back({t, static_cast<double>(alive) / static_cast<double>(total), alive});
    }
    return table;
}

double log_survival_r2(const std::vector<SurvivalRow>& table, double t_start, std::size_t min_alive) {
    std::vector<double> ts;
    std::vector<double> ys;
    for (const auto& row : table) {
        if (row.t < t_start || row.alive < min_alive || row.survival <= 0.0) continue;
        ts.push_back(row.t);
        ys.push_back(std::log(row.survival));
    }
    if (ts.size() < 3) return 0.0;
    const double n = static_cast<double>(ts.size());
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        my += ys[i];
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        sty += (ts[i] - mt) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (stt == 0.0 || syy == 0.0) return 0.0;
    return sty * sty / (stt * syy);
}

LifetimeSamples lifetime_distribution(const EnsembleSpec& spec, const TrainingCorpus& corpus,
                                      const WarmupPool& warmups, const EscapeRegion& region,
                                      const LifetimeOptions& options) {
    spec.validate();
    corpus.validate();
    region.validate();
    if (options.n_ics < 1) throw config_error("lifetimes: need at least one initial condition");
    if (!options.member_b.empty() && options.member_b.size() != spec.members)
        throw config_error("lifetimes: need one parameter value per member");
    std::vector<LifetimeSamples> parts(spec.members);
    parallel_for(spec.members, spec.threads, [&](std::size_t m) {
        const double b = options.member_b.empty() ? options.b : options.member_b[m];
        parts[m].horizon = options.t_max;
        if (std::isnan(b)) return;
        const std::uint64_t seed = spec.member_seed(m);
        Reservoir reservoir = Reservoir::build(spec.hyper, corpus.dim(), seed);
        reservoir.train(corpus);
        Rng rng(mix_seed(seed, 0x6c696665));
        LifetimeSamples& part = parts[m];
        for (std::size_t ic = 0; ic < options.n_ics; ++ic) {
            const TimeSeries warmup = warmups.draw(rng);
            const Classification c = classify_free_run(reservoir, warmup, b, region, options.t_max);
            part.add({m, ic, c.lifetime.value_or(options.t_max), !c.collapsed()});
        }
    });
    LifetimeSamples out = pool_samples(parts);
    out.horizon = options.t_max;
    if (out.lifetimes.size() >= 10) out.tau = fit_exponential(out).tau;
    return out;
}

LifetimeSamples oracle_lifetimes(const TrueSystem& system, double param, const std::vector<Eigen::VectorXd>& initial,
                                 const EscapeRegion& region, double t_max, std::size_t threads) {
    std::vector<std::optional<double>> escapes(initial.size());
    parallel_for(initial.size(), threads,
                 [&](std::size_t i) { escapes[i] = system.escape_time(param, initial[i], region, t_max); });
    LifetimeSamples out;
    out.horizon = t_max;
    for (std::size_t i = 0; i < escapes.size(); ++i) out.add({0, i, escapes[i].value_or(t_max), !escapes[i]});
    if (out.lifetimes.size() >= 10) out.tau = fit_exponential(out).tau;
    return out;
}

}  // namespace tipping
