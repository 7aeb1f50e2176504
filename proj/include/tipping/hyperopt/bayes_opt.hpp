#pragma once

#include "tipping/hyperopt/search_space.hpp"
#include "tipping/util/error.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <vector>

namespace tipping {

struct TraceEntry {
    std::size_t iter = 0;
    double loss = std::numeric_limits<double>::quiet_NaN();  ///< NaN when the evaluation failed
    Eigen::VectorXd point;
    std::uint64_t seed = 0;

    [[nodiscard]] bool failed() const { return !(loss == loss); }
};

struct OptimizationResult {
    Eigen::VectorXd best;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<TraceEntry> trace;
};

/// Objective at a point of the search space; may throw or return non-finite
/// values, which are recorded as failed evaluations.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& point, std::uint64_t seed)>;

struct OptimizerOptions {
    std::size_t budget = 150;
    std::size_t initial = 10;     ///< Latin-hypercube design size
    std::size_t candidates = 1024;
    std::size_t refine_starts = 8;  ///< best candidates polished by local search
    std::uint64_t seed = 1;
    std::size_t width = 1;        ///< parallel evaluations of the initial design

    void validate() const;
};

class OptimizationFailed : public Error {
public:
    OptimizationFailed(const std::string& what, std::vector<TraceEntry> trace)
        : Error(ErrorKind::numerical, what), trace_(std::move(trace)) {}
    [[nodiscard]] const std::vector<TraceEntry>& trace() const { return trace_; }

private:
    std::vector<TraceEntry> trace_;
};

/// GP / expected-improvement minimization. Entries of `resume` are reused in
/// place of re-evaluation; they must be a prefix of the trace this seed produces.
OptimizationResult optimize(const SearchSpace& space, const ObjectiveFn& objective, const OptimizerOptions& options,
                            const std::vector<TraceEntry>& resume = {});

/// `iter,loss,<dimension names...>,seed`
void write_trace_csv(const SearchSpace& space, const std::vector<TraceEntry>& trace, const std::filesystem::path& path);
std::vector<TraceEntry> read_trace_csv(const SearchSpace& space, const std::filesystem::path& path);

}  // namespace tipping
