#pragma once

#include "gamebsde/affine_rep.hpp"
#include "gamebsde/generators.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbsde {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exit codes of the batch runner.
enum class ExitCode : int {
    ok = 0,
    tolerance_failure = 1,
    config_error = 2,
    guard = 3,
};

struct Tolerances {
    double identity = 1e-12;
    double duality = 1e-12;
    double gap = 1e-12;
    double axioms = 1e-12;
};

struct ConcaveSettings {
    double beta1_lo = -1.0;
    double beta1_hi = 1.0;
    double beta1_step = 0.25;
    double beta2_half_width = 1.5;
    double beta2_step = 0.01;
    SupGrid sup;
};

/// One experiment, parsed from a single JSON document.
struct ExperimentConfig {
    std::string subcommand;
    double horizon = 1.0;
    int steps = 16;
    int dim = 1;

    std::string generator = "zero";
    CatalogParams generator_params;

    std::string terminal = "bt";
    double terminal_strike = 1.0;
    std::vector<double> terminal_values;

    std::string obstacle = "none";
    double obstacle_a = 0.0;
    double obstacle_b = 0.0;
    double obstacle_strike = 1.0;

    GridConfig grids;
    int level_s = 0;
    int level_t = -1;  // -1: N
    std::uint64_t seed = 0;
    int samples = 100;
    double alpha_half_width = 2.0;  // random controls for `dual`
    bool infsup = false;
    bool open_loop = false;
    std::optional<GridConfig> open_loop_grids;
    std::optional<double> domination_mu;
    ConcaveSettings concave;
    Tolerances tol;

    nlohmann::json raw;

    int terminal_level() const { return level_t < 0 ? steps : level_t; }
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"lemma-check", "solve",  "dual",    "game",
                                                "reflected-game", "axioms", "concave"};
    return names;
}

/// Throws ConfigError on unknown names, missing fields, or inconsistent values.
ExperimentConfig parse_config(const std::string& subcommand, const nlohmann::json& doc);

/// Artifacts of one run. `csv` and `summary` are written to <out>/<subcommand>.csv/.json.
struct RunOutcome {
    ExitCode code = ExitCode::ok;
    std::string message;
    std::string csv;
    nlohmann::json summary;
};

/// Runs the experiment without touching the filesystem. Guard errors (positivity, budget,
/// obstacle) map to ExitCode::guard; library argument errors to ExitCode::config_error.
RunOutcome run(const ExperimentConfig& cfg);

/// Parse `config_path`, apply the optional seed override, run, and write artifacts into
/// `out_dir`. Returns the process exit code.
int run_cli(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override);

} // namespace gbsde
