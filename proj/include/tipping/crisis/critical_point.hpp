#pragma once

#include "tipping/crisis/bisection.hpp"
#include "tipping/crisis/ensemble.hpp"
#include "tipping/dynsys/escape.hpp"
#include "tipping/dynsys/systems.hpp"
#include "tipping/reservoir/reservoir.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tipping {

struct CrisisOptions {
    double b_lo = 0.0;
    double b_hi = 1.0;
    double resolution = 1e-3;
    double t_max = 1e4;       ///< classification horizon, time units
    std::size_t votes = 5;    ///< prediction runs per tested parameter value
    double max_excluded = 0.2;

    void validate() const;
};

struct MemberEstimate {
    std::size_t member = 0;
    std::uint64_t seed = 0;
    double b_star = 0.0;
    BisectionFlag flag = BisectionFlag::none;
};

struct CrisisEstimate {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation (0 for a single member)
    double sem = 0.0;  ///< standard error of the mean
    std::size_t n = 0;
    std::vector<MemberEstimate> per_member;   ///< included members
    std::vector<MemberEstimate> excluded;     ///< members whose predictions diverged everywhere
};

/// Mean, sample std and SEM of the included members; checks the invariants.
CrisisEstimate summarize(std::vector<MemberEstimate> members, std::vector<MemberEstimate> excluded = {});

/// Majority vote of closed-loop runs (one per warmup) at parameter b.
class MemberClassifier {
public:
    MemberClassifier(const Reservoir& reservoir, std::vector<TimeSeries> warmups, const EscapeRegion& region,
                     double t_max);

    bool collapses(double b);
    /// True when every run performed so far diverged.
    [[nodiscard]] bool always_diverged() const { return runs_ > 0 && diverged_ == runs_; }

private:
    const Reservoir* reservoir_;
    std::vector<TimeSeries> warmups_;
    const EscapeRegion* region_;
    double t_max_;
    std::size_t runs_ = 0;
    std::size_t diverged_ = 0;
};

struct MemberOutcome {
    MemberEstimate estimate;
    bool all_diverged = false;
};

/// Builds and trains one ensemble member and bisects its predicted transition.
MemberOutcome estimate_member(const EnsembleSpec& spec, std::size_t member, const TrainingCorpus& corpus,
                              const WarmupPool& warmups, const EscapeRegion& region, const CrisisOptions& options);

/// Ensemble critical-point estimate. Throws ErrorKind::ensemble_unhealthy
/// when more than options.max_excluded of the members had to be excluded.
CrisisEstimate estimate_critical_point(const EnsembleSpec& spec, const TrainingCorpus& corpus,
                                       const WarmupPool& warmups, const EscapeRegion& region,
                                       const CrisisOptions& options);

/// Majority vote of ground-truth escapes from the given initial conditions.
bool oracle_collapses(const TrueSystem& system, double param, const std::vector<Eigen::VectorXd>& initial,
                      const EscapeRegion& region, double t_max);

/// The same bisection applied to the true system.
BisectionResult oracle_critical_point(const TrueSystem& system, const std::vector<Eigen::VectorXd>& initial,
                                      const EscapeRegion& region, const CrisisOptions& options);

}  // namespace tipping
