#pragma once

// Run configuration: a single JSON document validated up front, so that every
// later failure is a numerical condition rather than a malformed input.

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ump/errors.hpp"
#include "ump/grid.hpp"
#include "ump/potential.hpp"

namespace ump {

struct RunConfig {
    std::string command;
    Potential potential = Potential::zero();
    std::vector<int> n_values{16};
    int grid_m = 0; // 0 = derive from the largest n
    PrecisionMode precision = PrecisionMode::Double;
    double lambda0 = kPi / 2;
    double window_lo = -kPi / 2;
    double window_hi = kPi / 2;
    double box = 2.0;
    double ell = 0.0; // 0 = derive as ln n
    double tol = 1e-9;
    int max_iter = 2000;
    std::uint64_t seed = 12345;
    int samples = 10000;
    int bins = 32;
    double perturb = 0.0; // self-test knob: corrupts the basis ahead of verify-identities
    std::string out_dir = "out";
};

inline Potential potential_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigInvalid("potential must be an object with a 'kind' field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return Potential::zero();
    if (kind == "cosine") {
        if (!j.contains("t")) throw ConfigInvalid("cosine potential requires 't'");
        return Potential::cosine(j.at("t").get<double>());
    }
    if (kind == "fourier_cos") {
        if (!j.contains("coeffs")) throw ConfigInvalid("fourier_cos potential requires 'coeffs'");
        return Potential::fourier_cos(j.at("coeffs").get<std::vector<double>>());
    }
    throw ConfigInvalid("unknown potential kind: " + kind);
}

inline RunConfig parse_config(const nlohmann::json& j) {
    static const std::set<std::string> commands{"basis",     "density",      "equilibrium",
                                                "kernel",    "universality", "fourier",
                                                "sample",    "verify-identities"};
    static const std::set<std::string> keys{"command", "potential", "n_values", "grid_m",
                                            "precision", "lambda0",  "window",  "box",
                                            "ell",      "tol",      "max_iter", "seed",
                                            "samples",  "bins",     "perturb",  "out_dir"};
    if (!j.is_object()) throw ConfigInvalid("config root must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) throw ConfigInvalid("unknown config key: " + it.key());

    RunConfig cfg;
    try {
        if (!j.contains("command")) throw ConfigInvalid("config requires 'command'");
        cfg.command = j.at("command").get<std::string>();
        if (!commands.count(cfg.command)) throw ConfigInvalid("unknown command: " + cfg.command);

        if (j.contains("potential")) cfg.potential = potential_from_json(j.at("potential"));
        if (j.contains("n_values")) cfg.n_values = j.at("n_values").get<std::vector<int>>();
        if (j.contains("grid_m")) cfg.grid_m = j.at("grid_m").get<int>();
        if (j.contains("precision")) {
            const std::string p = j.at("precision").get<std::string>();
            if (p == "double") cfg.precision = PrecisionMode::Double;
            else if (p == "extended") cfg.precision = PrecisionMode::Extended;
            else throw ConfigInvalid("precision must be 'double' or 'extended'");
        }
        if (j.contains("lambda0")) cfg.lambda0 = j.at("lambda0").get<double>();
        if (j.contains("window")) {
            const auto w = j.at("window").get<std::vector<double>>();
            if (w.size() != 2 || !(w[0] < w[1]))
                throw ConfigInvalid("window must be [lo, hi] with lo < hi");
            cfg.window_lo = w[0];
            cfg.window_hi = w[1];
        }
        if (j.contains("box")) cfg.box = j.at("box").get<double>();
        if (j.contains("ell")) cfg.ell = j.at("ell").get<double>();
        if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
        if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
        if (j.contains("bins")) cfg.bins = j.at("bins").get<int>();
        if (j.contains("perturb")) cfg.perturb = j.at("perturb").get<double>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("malformed config value: ") + e.what());
    }

    if (cfg.n_values.empty()) throw ConfigInvalid("n_values must be nonempty");
    for (int n : cfg.n_values)
        if (n < 1) throw ConfigInvalid("n_values entries must be positive");
    if (cfg.grid_m < 0 || (cfg.grid_m > 0 && (cfg.grid_m < 256 || cfg.grid_m % 2 != 0)))
        throw ConfigInvalid("grid_m must be 0 (auto) or an even number >= 256");
    if (!(cfg.tol > 0.0)) throw ConfigInvalid("tol must be positive");
    if (cfg.max_iter < 1) throw ConfigInvalid("max_iter must be positive");
    if (cfg.samples < 1) throw ConfigInvalid("samples must be positive");
    if (cfg.bins < 2) throw ConfigInvalid("bins must be at least 2");
    if (!(cfg.box > 0.0)) throw ConfigInvalid("box halfwidth must be positive");
    if (cfg.ell < 0.0) throw ConfigInvalid("ell must be nonnegative (0 = auto)");
    if (cfg.out_dir.empty()) throw ConfigInvalid("out_dir must be nonempty");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot read config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

} // namespace ump
