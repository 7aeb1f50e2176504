#pragma once

#include "tipping/crisis/ensemble.hpp"
#include "tipping/dynsys/escape.hpp"
#include "tipping/dynsys/systems.hpp"
#include "tipping/reservoir/reservoir.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace tipping {

struct LifetimeRecord {
    std::size_t member = 0;
    std::size_t ic = 0;
    double lifetime = 0.0;  ///< escape time, or the horizon when censored
    bool censored = false;
};

struct LifetimeSamples {
    std::vector<double> lifetimes;  ///< uncensored escape times
    std::size_t censored = 0;
    double horizon = 0.0;
    std::optional<double> tau;
    std::vector<LifetimeRecord> records;

    void add(const LifetimeRecord& record);
};

/// Concatenates sample sets sharing one horizon.
LifetimeSamples pool_samples(const std::vector<LifetimeSamples>& parts);

enum class ShiftMode { min_observed, none };

struct ExponentialFit {
    double tau = 0.0;    ///< MLE of the mean of (lifetime - shift)
    double shift = 0.0;
    double ci_low = 0.0;  ///< 95% chi-square interval for tau
    double ci_high = 0.0;
    std::size_t n = 0;
};

/// Exponential MLE over uncensored lifetimes; needs at least 10 of them.
ExponentialFit fit_exponential(const LifetimeSamples& samples, ShiftMode shift = ShiftMode::min_observed);

struct SurvivalRow {
    double t = 0.0;
    double survival = 0.0;  ///< fraction of all runs (censored included) still alive after t
    std::size_t alive = 0;
};

/// Survival fraction on `bins` equal steps from 0 to the largest uncensored lifetime.
std::vector<SurvivalRow> survival_table(const LifetimeSamples& samples, std::size_t bins = 50);

/// R^2 of a least-squares line through log S(t), using rows at or after the
/// shortest lifetime with at least `min_alive` survivors.
double log_survival_r2(const std::vector<SurvivalRow>& table, double t_start, std::size_t min_alive = 10);

struct LifetimeOptions {
    double b = 0.0;
    std::size_t n_ics = 1;
    double t_max = 1e5;
    /// Per-member parameter values; overrides `b` when non-empty. NaN skips the member.
    std::vector<double> member_b;
};

/// Pooled predicted lifetimes over ensemble members x warmup segments.
LifetimeSamples lifetime_distribution(const EnsembleSpec& spec, const TrainingCorpus& corpus,
                                      const WarmupPool& warmups, const EscapeRegion& region,
                                      const LifetimeOptions& options);

/// Ground-truth lifetimes from the given initial conditions.
LifetimeSamples oracle_lifetimes(const TrueSystem& system, double param, const std::vector<Eigen::VectorXd>& initial,
                                 const EscapeRegion& region, double t_max, std::size_t threads = 1);

}  // namespace tipping
