// ump command-line front end: one JSON config per invocation, a few flag
// overrides, exit codes documented in the README.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ump/cli.hpp"
#include "ump/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"unitary matrix model toolkit"};
    std::string config_path;
    std::vector<int> n_override;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    std::string out_override;

    app.add_option("config", config_path, "path to a JSON run configuration")->required();
    app.add_option("--n", n_override, "override n_values");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the RNG seed");
    app.add_option("--out", out_override, "override the output directory");

    CLI11_PARSE(app, argc, argv);
    seed_given = seed_opt->count() > 0;

    try {
        ump::RunConfig cfg = ump::load_config(config_path);
        if (!n_override.empty()) {
            for (int n : n_override)
                if (n < 1) throw ump::ConfigInvalid("--n entries must be positive");
            cfg.n_values = n_override;
        }
        if (seed_given) cfg.seed = seed_override;
        if (!out_override.empty()) cfg.out_dir = out_override;
        return ump::run_command(cfg);
    } catch (const ump::ConfigInvalid& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const ump::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
}
