#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "vulnprio/ranking.hpp"
#include "vulnprio/scoring.hpp"
#include "vulnprio/triage.hpp"

namespace vulnprio::cli {

/// Bad configuration value, unknown key or unreadable config file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
EnvLookup process_environment();

struct RunConfig {
    std::optional<std::filesystem::path> cve_feed;
    std::optional<std::filesystem::path> exploit_feed;
    std::optional<std::filesystem::path> labels;
    std::optional<std::filesystem::path> assets;
    std::optional<std::filesystem::path> utility_model;
    std::optional<std::filesystem::path> opportune_model;
    std::optional<std::filesystem::path> output;
    ranking::ExportFormat format = ranking::ExportFormat::Text;

    std::uint64_t seed = 42;
    std::size_t min_df = 2;
    double lambda = 1e-4;
    int epochs = 20;
    double train_fraction = 0.8;
    bool stratified = false;

    scoring::EnvWeights env_weights;
    ranking::TierBounds tiers;

    /// Timestamp stamped on labels written by predict and label. Unset
    /// means the current time.
    std::optional<std::string> now;

    triage::TrainConfig train_config() const { return {lambda, epochs, seed, min_df}; }
    triage::SplitOptions split_options() const { return {train_fraction, seed, stratified}; }
    const std::optional<std::filesystem::path>& model_path(triage::Task task) const {
        return task == triage::Task::Utility ? utility_model : opportune_model;
    }
};

/// Keys settable from every layer, in the spelling used by the config file.
/// Flags use dashes instead of underscores, environment variables the
/// VULNPRIO_ prefix and upper case.
inline constexpr const char* kConfigKeys[] = {
    "cve_feed", "exploit_feed", "labels",         "assets",     "utility_model", "opportune_model",
    "output",   "format",       "seed",           "min_df",     "lambda",        "epochs",
    "train_fraction", "stratified", "tiers", "now",
};

std::string env_var_name(const std::string& key);

/// Layers, highest priority first: command-line flags, environment,
/// config file, built-in defaults. `config_file` is the --config value or,
/// failing that, VULNPRIO_CONFIG. Relative paths from the config file are
/// resolved against its directory.
RunConfig resolve_config(const std::map<std::string, std::string>& flags,
                         const std::optional<std::filesystem::path>& config_file, const EnvLookup& env);

}  // namespace vulnprio::cli
