#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace laplace::cli {

struct Assertion {
    std::string name;
    bool pass;
    std::string detail;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<Assertion> assertions;
    std::vector<std::string> files;
    double elapsed_ms = 0.0;

    bool ok() const {
        for (const auto& a : assertions)
            if (!a.pass) return false;
        return true;
    }
};

struct ExperimentConfig {
    std::string experiment;
    nlohmann::json params; // experiment-specific, defaults applied per field
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
};

// Parses and validates a JSON config file. Throws ConfigError with the
// offending field named.
ExperimentConfig parse_config_file(const std::string& path);

struct ExperimentInfo {
    std::string name;
    std::string description;
};
const std::vector<ExperimentInfo>& experiment_catalog();

// Runs one experiment: writes results.csv, summary.json and plot.gp into
// config.out_dir (plus experiment-specific extra tables).
ExperimentResult run_experiment(const ExperimentConfig& config);

} // namespace laplace::cli
