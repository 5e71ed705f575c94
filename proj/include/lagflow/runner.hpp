// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lagflow/diagnostics.hpp"
#include "lagflow/euler.hpp"
#include "lagflow/io.hpp"
#include "lagflow/scenario.hpp"
#include "lagflow/surface_distance.hpp"

namespace lagflow {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 2,
    exit_numerical = 3,
    exit_acceptance = 4,
};

namespace detail {

class StageTimer {
  public:
    explicit StageTimer(const std::filesystem::path& path) : path_(path) {}
    void record(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        stages_.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
        last_ = now;
    }
    ~StageTimer() {
        std::ofstream out(path_);
        out << "stage,seconds\n";
        for (const auto& [name, secs] : stages_) out << name << ',' << secs << '\n';
    }

  private:
    std::filesystem::path path_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, double>> stages_;
};

inline json synthesis_to_json(const SynthesisReport& rep) {
    json snaps = json::array();
    for (const auto& s : rep.snapshots)
        snaps.push_back({{"time", s.time},
                         {"neumann_residual", s.neumann_residual},
                         {"approx_residual", s.approx_residual},
                         {"approx_small_residual", s.approx_small_residual},
                         {"seal_residual", s.seal_residual},
                         {"flux_compat", s.flux_compat},
                         {"control_norm", s.control_norm},
                         {"pole_count", s.pole_count},
                         {"condition_number", s.condition_number}});
    return {{"snapshots", snaps},
            {"eta", rep.eta},
            {"max_seal_residual", rep.max_seal_residual},
            {"basis_seal_leak", rep.basis_seal_leak},
            {"max_potential_variation", rep.max_potential_variation},
            {"round_miss", rep.round_miss}};
}

inline json result_to_json(const Scenario& sc, const EulerRunResult& res) {
    json j;
    j["final_hausdorff"] = res.final_distance.hausdorff;
    j["final_mean"] = res.final_distance.mean;
    j["final_normal_deviation"] = res.final_distance.normal_deviation;
    j["acceptance"] = {{"max_hausdorff", sc.max_hausdorff_rel * sc.gamma0_radius},
                       {"pass", res.final_distance.hausdorff <=
                                    sc.max_hausdorff_rel * sc.gamma0_radius}};
    j["rho"] = res.rho;
    j["u0_norm"] = res.u0_norm;
    j["ybar_norm"] = res.ybar_norm;
    j["marker_count"] = res.marker_count;
    j["picard"] = {{"iterations", res.picard.iterations},
                   {"converged", res.picard.converged},
                   {"residuals", res.picard.residuals},
                   {"ball_norms", res.picard.ball_norms}};
    j["containment"] = {{"pass", res.containment.pass},
                        {"min_clearance", res.containment.min_clearance}};
    j["gronwall"] = {{"pass", res.gronwall.pass}, {"margin", res.gronwall.margin}};
    j["euler_residual"] = {{"residual", res.euler_res.residual},
                           {"estimate", res.euler_res.estimate},
                           {"dt", res.euler_res.dt},
                           {"h", res.euler_res.h}};
    double drift = 0.0;
    for (double v : res.volume_series)
        drift = std::max(drift, std::abs(v - res.volume_series.front()));
    j["volume_drift_rel"] = drift / std::abs(res.volume_series.front());
    j["synthesis"] = synthesis_to_json(res.synthesis);
    return j;
}

inline void write_outputs(const std::filesystem::path& dir, const Scenario& sc,
                          const EulerRunResult& res, bool snapshots) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "summary.json");
        out << result_to_json(sc, res).dump(2) << '\n';
    }
    {
        CsvWriter csv(dir / "iterations.csv", {"iter", "residual", "ball_norm", "lambda_norm"});
        for (std::size_t k = 0; k < res.picard.residuals.size(); ++k)
            csv.row({double(k), res.picard.residuals[k],
                     k < res.picard.ball_norms.size() ? res.picard.ball_norms[k] : 0.0,
                     k < res.picard.lambda_norms.size() ? res.picard.lambda_norms[k] : 0.0});
    }
    {
        CsvWriter csv(dir / "transport_log.csv", {"time", "max_omega", "max_grad_u"});
        for (const auto& s : res.picard.transport_log)
            csv.row({s.time, s.max_omega, s.max_grad_u});
    }
    {
        CsvWriter csv(dir / "volume_series.csv", {"time", "volume"});
        for (std::size_t k = 0; k < res.volume_series.size(); ++k)
            csv.row({res.snapshot_times[k], res.volume_series[k]});
    }
    if (snapshots) {
        const auto snap_dir = dir / "snapshots";
        std::filesystem::create_directories(snap_dir);
        char name[64];
        for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
            std::snprintf(name, sizeof(name), "snapshot_%03zu", k);
            write_obj(res.trajectory[k], snap_dir / (std::string(name) + ".obj"));
            write_vtk_polydata(res.trajectory[k], snap_dir / (std::string(name) + ".vtk"),
                               std::string(name));
        }
    }
    {
        // final field on a coarse export lattice
        CsvWriter csv(dir / "field_lattice.csv", {"x", "y", "z", "ux", "uy", "uz"});
        const auto scenario = build_scenario(sc);
        const auto pts = detail::interior_lattice(scenario.domain, 6,
                                                  0.25 * scenario.domain.max_radius());
        for (const auto& p : pts) {
            const Vec3 u = res.picard.u_fixed(res.rho, p);
            csv.row({p.x(), p.y(), p.z(), u.x(), u.y(), u.z()});
        }
    }
}

}  // namespace detail

/// `synthesize`: control synthesis only; writes the control report and the
/// endpoint surface reached under grad(theta).
inline int run_synthesize(const Scenario& sc, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    detail::StageTimer timer(dir / "timings.csv");
    {
        std::ofstream out(dir / "config_echo.json");
        out << scenario_to_json(sc).dump(2) << '\n';
    }
    EulerScenario scenario = build_scenario(sc);
    validate_scenario(scenario);
    timer.record("validate");

    auto solver = make_domain_solver(scenario.domain, sc.numerics.synthesis);
    auto [control, report] =
        synthesize_control(scenario.isotopy, scenario.gamma0, scenario.domain,
                           sc.numerics.synthesis, solver);
    timer.record("synthesize");

    const auto moved =
        advect_surface(scenario.gamma0, control, 0.0, 1.0, sc.numerics.advect_steps);
    const auto dist = surface_distance(moved, scenario.gamma1);
    timer.record("advect");

    write_obj(moved, dir / "endpoint.obj");
    write_vtk_polydata(moved, dir / "endpoint.vtk", "endpoint");
    json j = detail::synthesis_to_json(report);
    j["final_hausdorff"] = dist.hausdorff;
    j["final_mean"] = dist.mean;
    j["acceptance"] = {{"max_hausdorff", sc.max_hausdorff_rel * sc.gamma0_radius},
                       {"pass", dist.hausdorff <= sc.max_hausdorff_rel * sc.gamma0_radius}};
    std::ofstream out(dir / "control_report.json");
    out << j.dump(2) << '\n';
    timer.record("write");
    return dist.hausdorff <= sc.max_hausdorff_rel * sc.gamma0_radius ? exit_ok : exit_acceptance;
}

/// `simulate`: the full controlled-Euler pipeline with every diagnostic.
inline int run_simulate(const Scenario& sc, const std::filesystem::path& dir,
                        bool snapshots = true) {
    std::filesystem::create_directories(dir);
    detail::StageTimer timer(dir / "timings.csv");
    {
        std::ofstream out(dir / "config_echo.json");
        out << scenario_to_json(sc).dump(2) << '\n';
    }
    EulerScenario scenario = build_scenario(sc);
    validate_scenario(scenario);
    timer.record("validate");

    const EulerRunResult res = solve_controlled_euler(scenario);
    timer.record("solve");

    detail::write_outputs(dir, sc, res, snapshots);
    timer.record("write");

    const bool pass = res.final_distance.hausdorff <= sc.max_hausdorff_rel * sc.gamma0_radius &&
                      res.containment.pass;
    return pass ? exit_ok : exit_acceptance;
}

/// `verify`: recompute diagnostics from the stored outputs of a simulate run
/// and check them against the stored summary.
inline int run_verify(const Scenario& sc, const std::filesystem::path& dir) {
    const auto summary_path = dir / "summary.json";
    if (!std::filesystem::exists(summary_path))
        throw ParameterError("verify: no summary.json under " + dir.string());
    json stored;
    {
        std::ifstream in(summary_path);
        in >> stored;
    }
    EulerScenario scenario = build_scenario(sc);

    json report;
    bool ok = true;

    // trajectory-based checks from the stored snapshots
    std::vector<TriangulatedSurface> trajectory;
    for (int k = 0;; ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%03d.obj", k);
        const auto path = dir / "snapshots" / name;
        if (!std::filesystem::exists(path)) break;
        trajectory.push_back(read_obj(path));
    }
    if (!trajectory.empty()) {
        const auto containment = containment_check(trajectory, scenario.domain);
        report["containment"] = {{"pass", containment.pass},
                                 {"min_clearance", containment.min_clearance}};
        ok = ok && containment.pass == stored.at("containment").at("pass").get<bool>();

        const auto dist = surface_distance(trajectory.back(), scenario.gamma1);
        report["final_hausdorff"] = dist.hausdorff;
        const double stored_h = stored.at("final_hausdorff").get<double>();
        ok = ok && std::abs(dist.hausdorff - stored_h) <= 1e-9 * (1.0 + stored_h);

        double drift = 0.0;
        const double v0 = enclosed_volume(trajectory.front());
        for (const auto& s : trajectory)
            drift = std::max(drift, std::abs(enclosed_volume(s) - v0));
        report["volume_drift_rel"] = drift / std::abs(v0);
    } else {
        report["containment"] = "no snapshots stored";
    }

    // gronwall from the stored transport log
    const auto log_path = dir / "transport_log.csv";
    if (std::filesystem::exists(log_path)) {
        TransportLog log;
        std::ifstream in(log_path);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            TransportSample s;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &s.time, &s.max_omega, &s.max_grad_u) == 3)
                log.push_back(s);
        }
        if (!log.empty()) {
            const auto g = gronwall_audit(log);
            report["gronwall"] = {{"pass", g.pass}, {"margin", g.margin}};
            ok = ok && g.pass == stored.at("gronwall").at("pass").get<bool>();
        }
    }

    report["verdicts_match_stored"] = ok;
    std::ofstream out(dir / "verify_report.json");
    out << report.dump(2) << '\n';
    return ok ? exit_ok : exit_acceptance;
}

namespace detail {

inline void apply_override(json& j, const std::string& dotted, const json& value) {
    json* node = &j;
    std::size_t pos = 0;
    for (;;) {
        const auto dot = dotted.find('.', pos);
        const std::string key = dotted.substr(pos, dot - pos);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace detail

/// `sweep`: grid over one named scenario parameter; per value a quiet simulate
/// run, one CSV row of final distances.
inline int run_sweep(const Scenario& base, const std::filesystem::path& dir) {
    if (base.sweep_parameter.empty() || base.sweep_values.empty())
        throw ParameterError("sweep: scenario must provide sweep.parameter and sweep.values");
    std::filesystem::create_directories(dir);
    CsvWriter csv(dir / "sweep.csv",
                  {"value", "final_hausdorff", "final_mean", "picard_iterations"});
    int worst = exit_ok;
    for (double value : base.sweep_values) {
        json j = scenario_to_json(base);
        const bool integral = std::nearbyint(value) == value &&
                              (base.sweep_parameter.find("count") != std::string::npos ||
                               base.sweep_parameter.find("level") != std::string::npos ||
                               base.sweep_parameter.find("nodes") != std::string::npos ||
                               base.sweep_parameter.find("steps") != std::string::npos ||
                               base.sweep_parameter.find("stride") != std::string::npos ||
                               base.sweep_parameter.find("rounds") != std::string::npos ||
                               base.sweep_parameter.find("iter") != std::string::npos);
        detail::apply_override(j, base.sweep_parameter,
                               integral ? json(std::int64_t(value)) : json(value));
        const Scenario sc = scenario_from_json(j);
        EulerScenario scenario = build_scenario(sc);
        validate_scenario(scenario);
        const EulerRunResult res = solve_controlled_euler(scenario);
        csv.row({value, res.final_distance.hausdorff, res.final_distance.mean,
                 double(res.picard.iterations)});
        if (res.final_distance.hausdorff > sc.max_hausdorff_rel * sc.gamma0_radius)
            worst = exit_acceptance;
    }
    return worst;
}

}  // namespace lagflow
