#pragma once

#include "tipping/cli/config.hpp"
#include "tipping/util/error.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

namespace tipping {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_data = 3,
    exit_unhealthy = 4,
    exit_censored = 5,
};

int exit_code(ErrorKind kind);

struct Invocation {
    std::string command;  ///< simulate | train | crisis | lifetimes | tune
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::size_t> threads;
};

/// Output directory: --out, then $TIPPING_SCOUT_OUT, then the config's "output",
/// then "./<command>".
std::filesystem::path output_directory(const Invocation& inv, const ExperimentConfig& config);

/// Runs one command end to end and returns its exit code. Errors are reported
/// on stderr; artifacts written before a failure are kept.
int run(const Invocation& inv);

int cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out, std::size_t threads);
int cmd_train(const ExperimentConfig& config, const std::filesystem::path& out, std::size_t threads);
int cmd_crisis(const ExperimentConfig& config, const std::filesystem::path& out, std::size_t threads);
int cmd_lifetimes(const ExperimentConfig& config, const std::filesystem::path& out, std::size_t threads);
int cmd_tune(const ExperimentConfig& config, const std::filesystem::path& out, std::size_t threads);

extern const char* const tool_version;

}  // namespace tipping
