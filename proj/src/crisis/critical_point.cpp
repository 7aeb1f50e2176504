#include "tipping/crisis/critical_point.hpp"

#include "tipping/crisis/classify.hpp"
#include "tipping/util/error.hpp"
#include "tipping/util/parallel.hpp"

#include <cmath>
#include <numeric>

namespace tipping {

void CrisisOptions::validate() const {
    if (!(b_lo < b_hi)) throw config_error("crisis: need b_lo < b_hi");
    if (!(resolution > 0.0)) throw config_error("crisis: resolution must be positive");
    if (!(t_max >= 1.0)) throw config_error("crisis: t_max must be at least 1");
    if (votes < 1) throw config_error("crisis: need at least one vote");
    if (!(max_excluded >= 0.0 && max_excluded <= 1.0)) throw config_error("crisis: max_excluded must lie in [0, 1]");
}

CrisisEstimate summarize(std::vector<MemberEstimate> members, std::vector<MemberEstimate> excluded) {
    CrisisEstimate out;
    out.per_member = std::move(members);
    out.excluded = std::move(excluded);
    out.n = out.per_member.size();
    if (out.n == 0) return out;
    double sum = 0.0;
    for (const auto& m : out.per_member) sum += m.b_star;
    out.mean = sum / static_cast<double>(out.n);
    if (out.n > 1) {
        double sq = 0.0;
        for (const auto& m : out.per_member) sq += (m.b_star - out.mean) * (m.b_star - out.mean);
        out.std = std::sqrt(sq / static_cast<double>(out.n - 1));
        out.sem = out.std / std::sqrt(static_cast<double>(out.n));
    }
    return out;
}

MemberClassifier::MemberClassifier(const Reservoir& reservoir, std::vector<TimeSeries> warmups,
                                   const EscapeRegion& region, double t_max)
    : reservoir_(&reservoir), warmups_(std::move(warmups)), region_(&region), t_max_(t_max) {
    if (warmups_.empty()) throw config_error("member classifier: need at least one warmup");
}

bool MemberClassifier::collapses(double b) {
    const std::size_t votes = warmups_.size();
    const std::size_t majority = votes / 2 + 1;
    std::size_t collapse = 0;
    std::size_t sustained = 0;
    for (const auto& warmup : warmups_) {
        const Classification c = classify_free_run(*reservoir_, warmup, b, *region_, t_max_);
        ++runs_;
        if (c.diverged) ++diverged_;
        if (c.collapsed()) {
            ++collapse;
        } else {
            ++sustained;
        }
        if (collapse >= majority || sustained >= majority) break;
    }
    return collapse >= majority;
}

MemberOutcome estimate_member(const EnsembleSpec& spec, std::size_t member, const TrainingCorpus& corpus,
                              const WarmupPool& warmups, const EscapeRegion& region, const CrisisOptions& options) {
    const std::uint64_t seed = spec.member_seed(member);
    Reservoir reservoir = Reservoir::build(spec.hyper, corpus.dim(), seed);
    reservoir.train(corpus);

    Rng rng(mix_seed(seed, 0x766f7465));
    std::vector<TimeSeries> segments;
    for (std::size_t v = 0; v < options.votes; ++v) segments.push_back(warmups.draw(rng));
    MemberClassifier classifier(reservoir, std::move(segments), region, options.t_max);
    const BisectionResult bisection = bisect_transition([&](double b) { return classifier.collapses(b); },
                                                        options.b_lo, options.b_hi, options.resolution);
    MemberOutcome out;
    out.estimate = {member, seed, bisection.estimate, bisection.flag};
    out.all_diverged = classifier.always_diverged();
    return out;
}

CrisisEstimate estimate_critical_point(const EnsembleSpec& spec, const TrainingCorpus& corpus,
                                       const WarmupPool& warmups, const EscapeRegion& region,
                                       const CrisisOptions& options) {
    spec.validate();
    options.validate();
    corpus.validate();
    region.validate();
    std::vector<MemberOutcome> outcomes(spec.members);
    parallel_for(spec.members, spec.threads, [&](std::size_t m) {
        outcomes[m] = estimate_member(spec, m, corpus, warmups, region, options);
    });
    std::vector<MemberEstimate> included;
    std::vector<MemberEstimate> excluded;
    for (const auto& o : outcomes) (o.all_diverged ? excluded : included).push_back(o.estimate);
    if (static_cast<double>(excluded.size()) > options.max_excluded * static_cast<double>(spec.members))
        throw Error(ErrorKind::ensemble_unhealthy, "ensemble unhealthy: " + std::to_string(excluded.size()) + " of " +
                                                       std::to_string(spec.members) + " members diverged at every b");
    return summarize(std::move(included), std::move(excluded));
}

bool oracle_collapses(const TrueSystem& system, double param, const std::vector<Eigen::VectorXd>& initial,
                      const EscapeRegion& region, double t_max) {
    if (initial.empty()) throw config_error("oracle: need at least one initial condition");
    const std::size_t majority = initial.size() / 2 + 1;
    std::size_t collapse = 0;
    std::size_t sustained = 0;
    for (const auto& x0 : initial) {
        if (system.escape_time(param, x0, region, t_max)) {
            ++collapse;
        } else {
            ++sustained;
        }
        if (collapse >= majority || sustained >= majority) break;
    }
    return collapse >= majority;
}

BisectionResult oracle_critical_point(const TrueSystem& system, const std::vector<Eigen::VectorXd>& initial,
                                      const EscapeRegion& region, const CrisisOptions& options) {
    options.validate();
    return bisect_transition([&](double b) { return oracle_collapses(system, b, initial, region, options.t_max); },
                             options.b_lo, options.b_hi, options.resolution);
}

}  // namespace tipping
