#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gincorr/entry_distribution.hpp"
#include "gincorr/hciz.hpp"
#include "gincorr/mc_engine.hpp"
#include "json.hpp"

namespace gincorr::cli {

/// Configuration problems carry the offending key in the message; exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputSpec {
    std::string path;            // empty = stdout
    std::string format = "json";  // "json" or "csv" (sweeps)
};

struct ExperimentConfig {
    std::string command;  // estimate | exact | predict | verify-theorem | hciz-verify | f1-check
    std::complex<double> z0;
    std::vector<std::complex<double>> zetas;
    std::vector<int> n_values;  // one entry normally; several = a sweep
    EntryDistribution distribution = EntryDistribution::complex_gaussian();
    std::int64_t samples = 100000;
    std::int64_t chunk_size = 10000;
    int workers = 0;
    std::uint64_t seed = 1;
    double sigma = 4.0;
    bool strict = false;
    OutputSpec output;
    HcizInput hciz{{{0.0, 0.0}, {1.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}, {1.0, 0.0}};
    std::int64_t hciz_samples = 1000000;

    PointConfig point_config(int n) const { return PointConfig{z0, zetas, n}; }
    /// The normalized config document embedded in every report.
    nlohmann::ordered_json to_json() const;
};

/// Parse and validate; unknown keys are rejected by name.
ExperimentConfig parse_config(const nlohmann::json& doc);

struct ResultRow {
    std::string name;
    int n = 0;
    double log_value = 0.0;
    double stderr_log = 0.0;
    double prediction_log = 0.0;
    double z_score = 0.0;
    bool has_stderr = false;
    bool has_prediction = false;
    bool has_z = false;
    std::vector<std::string> flags;
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<ResultRow> rows;
    std::vector<std::string> flags;
    nlohmann::ordered_json report;  // fully rendered JSON report
    std::string csv;                // rendered only for format == "csv"
};

/// Execute a validated config. Deterministic apart from the report's
/// timestamp and wall_time_s fields.
RunOutcome run(const ExperimentConfig& config);

/// Full command-line entry: flags, config IO, report writing, exit status.
int run_cli(int argc, char** argv);

}  // namespace gincorr::cli
