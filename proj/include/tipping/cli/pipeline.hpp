#pragma once

#include "tipping/cli/config.hpp"
#include "tipping/dynsys/systems.hpp"
#include "tipping/hyperopt/objective.hpp"
#include "tipping/reservoir/reservoir.hpp"

#include <filesystem>
#include <memory>
#include <vector>

namespace tipping {

/// Built-in simulator for the config, or nullptr for external-csv.
std::unique_ptr<TrueSystem> make_system(const SystemConfig& config);

Eigen::VectorXd initial_state(const SystemConfig& config, const TrueSystem& system);

/// Data shared by the commands: training corpus, held-out tails for external
/// series, escape region and the reference series used for warmups.
struct Workspace {
    std::unique_ptr<TrueSystem> system;
    TrainingCorpus corpus;
    std::vector<TimeSeries> external;             ///< full external series, same order as training sessions
    std::vector<std::filesystem::path> inputs;    ///< files read
    std::size_t reference = 0;                    ///< index of the reference session
    EscapeRegion region;

    [[nodiscard]] const TimeSeries& reference_series() const { return corpus.sessions.at(reference).series; }
    [[nodiscard]] std::vector<std::string> coord_names() const;
};

Workspace prepare(const ExperimentConfig& config);

/// Held-out truth for every training value: the continuation of the training
/// trajectory (built-in systems) or the unused tail of each file (external-csv).
ValidationSet validation_set(const ExperimentConfig& config, const Workspace& ws);

}  // namespace tipping
