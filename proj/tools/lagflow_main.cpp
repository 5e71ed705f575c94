// SPDX-License-Identifier: Apache-2.0
//
// Scenario-driven front end: synthesize boundary controls, run the controlled
// Euler pipeline, re-verify stored outputs, or sweep one parameter.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lagflow/runner.hpp"

namespace {

using lagflow::json;

json load_scenario_json(const std::string& path,
                        const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw lagflow::ParameterError("cannot open scenario file " + path);
    json j;
    in >> j;
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw lagflow::ParameterError("override must be key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (...) {
            value = raw;  // plain string
        }
        lagflow::detail::apply_override(j, key, value);
    }
    return j;
}

void write_error(const std::filesystem::path& dir, const std::string& kind,
                 const std::string& what, int code) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir / "error.json");
    out << json{{"kind", kind}, {"what", what}, {"exit_code", code}}.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary-controlled Lagrangian transport in a 3D perfect fluid"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> overrides;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the scenario RNG seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--override", overrides,
                        "dotted-path overrides, e.g. numerics.time_nodes=49");
    };
    auto* synth = app.add_subcommand("synthesize", "control synthesis and its report");
    auto* sim = app.add_subcommand("simulate", "full controlled-Euler pipeline");
    auto* verify = app.add_subcommand("verify", "recompute diagnostics from stored outputs");
    auto* sweep = app.add_subcommand("sweep", "grid over one named parameter");
    for (auto* cmd : {synth, sim, verify, sweep}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    const std::filesystem::path dir(out_dir);
    std::string stage = "validate";
    try {
        json j = load_scenario_json(scenario_path, overrides);
        if (seed_set) j["seed"] = seed;
        const lagflow::Scenario sc = lagflow::scenario_from_json(j);
        {
            auto scenario = lagflow::build_scenario(sc);
            lagflow::validate_scenario(scenario);
        }

        stage = "run";
        int code = 0;
        if (synth->parsed()) code = lagflow::run_synthesize(sc, dir);
        if (sim->parsed()) code = lagflow::run_simulate(sc, dir);
        if (verify->parsed()) code = lagflow::run_verify(sc, dir);
        if (sweep->parsed()) code = lagflow::run_sweep(sc, dir);
        if (code == lagflow::exit_acceptance)
            std::cerr << "acceptance threshold missed (see " << (dir / "summary.json").string()
                      << ")\n";
        return code;
    } catch (const lagflow::BlowUpError& e) {
        write_error(dir, "blow_up", e.what(), lagflow::exit_numerical);
        std::cerr << "numerical failure: " << e.what() << '\n';
        return lagflow::exit_numerical;
    } catch (const lagflow::ConvergenceError& e) {
        write_error(dir, "non_convergence", e.what(), lagflow::exit_numerical);
        std::cerr << "numerical failure: " << e.what() << '\n';
        return lagflow::exit_numerical;
    } catch (const lagflow::BallViolationError& e) {
        write_error(dir, "ball_violation", e.what(), lagflow::exit_numerical);
        std::cerr << "numerical failure: " << e.what() << '\n';
        return lagflow::exit_numerical;
    } catch (const lagflow::ConditioningError& e) {
        write_error(dir, "conditioning", e.what(), lagflow::exit_numerical);
        std::cerr << "numerical failure: " << e.what() << '\n';
        return lagflow::exit_numerical;
    } catch (const lagflow::GeometryError& e) {
        const int code = stage == "validate" ? lagflow::exit_validation : lagflow::exit_numerical;
        write_error(dir, "geometry", e.what(), code);
        std::cerr << "geometry error: " << e.what() << '\n';
        return code;
    } catch (const lagflow::Error& e) {
        write_error(dir, "validation", e.what(), lagflow::exit_validation);
        std::cerr << "validation error: " << e.what() << '\n';
        return lagflow::exit_validation;
    } catch (const std::exception& e) {
        write_error(dir, "internal", e.what(), lagflow::exit_validation);
        std::cerr << "error: " << e.what() << '\n';
        return lagflow::exit_validation;
    }
}
