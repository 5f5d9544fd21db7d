// Batch runner: gamebsde_cli <subcommand> --config <path> [--out <dir>] [--seed <u64>]
#include "gamebsde/runner.hpp"

#include "CLI11.hpp"

#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Discrete BSDE games on a recombining Brownian lattice"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    for (const auto& name : gbsde::subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON experiment file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "overrides the seed in the config");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(gbsde::ExitCode::config_error);
    }
    return gbsde::run_cli(app.get_subcommands().front()->get_name(), config, out_dir, seed);
}
