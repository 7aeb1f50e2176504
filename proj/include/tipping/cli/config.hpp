#pragma once

#include "tipping/crisis/critical_point.hpp"
#include "tipping/dynsys/escape.hpp"
#include "tipping/dynsys/food_chain.hpp"
#include "tipping/dynsys/ikeda.hpp"
#include "tipping/hyperopt/bayes_opt.hpp"
#include "tipping/hyperopt/objective.hpp"
#include "tipping/reservoir/hyper_params.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tipping {

struct ExternalSeries {
    double param = 0.0;
    std::filesystem::path path;  ///< resolved against the config file's directory
};

struct SystemConfig {
    std::string id = "ikeda";  ///< ikeda | foodchain | external-csv
    IkedaParams ikeda;
    FoodChainParams food_chain;
    double step = 0.01;        ///< food chain RK4 step
    std::size_t stride = 10;   ///< food chain steps per sample
    double extinction = 1e-4;  ///< food chain predator floor
    std::optional<std::vector<double>> initial;
    std::vector<ExternalSeries> files;
};

struct RegionConfig {
    double inflate = 0.5;
    std::size_t grace = 10;
    std::optional<std::vector<double>> lower;  ///< explicit box; both or neither
    std::optional<std::vector<double>> upper;
    std::optional<Floor> floor;
    std::optional<double> reference_param;     ///< training value whose series defines the box and warmups
};

struct SimulateConfig {
    std::vector<double> params;
    std::size_t samples = 100000;
    std::size_t burn_in = 1000;
};

struct TrainingConfig {
    std::vector<double> params;
    std::size_t samples = 100000;  ///< post-washout samples per session
    std::size_t washout = 1000;
    std::size_t burn_in = 2000;
};

struct EnsembleConfig {
    std::size_t members = 1;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;
};

struct LifetimesConfig {
    std::optional<double> b;
    std::optional<double> offset;    ///< distance past each member's own critical point; excludes `b`
    std::optional<double> oracle_b;  ///< ground-truth parameter; defaults to `b`, or oracle critical point + offset
    std::size_t n_ics = 100;
    double t_max = 1e5;
    std::size_t bins = 50;
    std::size_t oracle_ics = 0;  ///< ground-truth runs for comparison; built-in systems only
    double oracle_noise = 0.0;   ///< IC perturbation as a fraction of each coordinate's range
    std::uint64_t oracle_seed = 1;
};

struct TuneConfig {
    OptimizerOptions optimizer;
    ObjectiveSpec objective;
    std::optional<std::vector<double>> lyapunov;  ///< per training value; required for external-csv
    std::size_t lyapunov_steps = 20000;
    std::optional<std::filesystem::path> resume;
};

struct ExperimentConfig {
    SystemConfig system;
    RegionConfig region;
    SimulateConfig simulate;
    TrainingConfig training;
    HyperParams hyper;
    bool tune_hyper = false;  ///< "hyper": "tune" runs the optimizer before the command
    EnsembleConfig ensemble;
    CrisisOptions crisis;
    LifetimesConfig lifetimes;
    TuneConfig tune;
    std::size_t warmup = 1000;
    std::optional<std::size_t> threads;
    std::optional<std::filesystem::path> output;

    nlohmann::json echo;                 ///< the parsed document, for manifests
    std::filesystem::path source;        ///< config file path
    std::vector<std::filesystem::path> includes;  ///< hyperparameter fragments read
};

/// Parses a config document. Unknown keys and type mismatches are config errors.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source);
ExperimentConfig load_config(const std::filesystem::path& path);

/// {"hyper": {...}} fragment accepted by the "hyper" key's "include" form.
nlohmann::json hyper_to_json(const HyperParams& hyper);

}  // namespace tipping
