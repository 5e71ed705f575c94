// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/euler.hpp"
#include "lagflow/isotopy.hpp"

namespace lagflow {

using nlohmann::json;

/// Scenario file schema: every knob of a run, JSON in and out. Parsing is
/// strict about types but fills defaults; the full resolved configuration is
/// echoed back so no silent default survives a run unrecorded.
struct Scenario {
    // domain
    std::string domain_shape = "ball";  // ball | ellipsoid | bumpy_ball
    Vec3 domain_center = Vec3::Zero();
    double domain_radius = 2.0;
    Vec3 ellipsoid_semi_axes{1.0, 1.0, 1.0};
    double bumpy_amplitude = 0.1;
    int bumpy_degree = 2;
    Vec3 patch_axis{0.0, 0.0, 1.0};
    double patch_cos_threshold = 0.8;

    // tracked surfaces
    Vec3 gamma0_center{-0.8, 0.0, 0.0};
    double gamma0_radius = 0.5;
    Vec3 gamma1_center{0.8, 0.0, 0.0};
    Vec3 gamma1_scale{1.0, 1.0, 1.0};
    int mesh_level = 3;

    // isotopy
    std::string isotopy_type = "translation";  // translation | composite
    double tube_radius = 0.35;
    std::vector<IsotopyWaypoint> waypoints;

    // initial velocity
    std::string u0_type = "zero";  // zero | curl_bump
    Vec3 u0_center = Vec3::Zero();
    double u0_sigma = 0.12;
    Vec3 u0_axis{0.0, 0.0, 1.0};
    double u0_amplitude_rel = 0.0;  // x ||ybar|| on the working lattice

    EulerNumerics numerics;

    double max_hausdorff_rel = 0.05;  // acceptance: x gamma0_radius
    std::uint64_t seed = 20110817;

    std::string sweep_parameter;  // dotted path, e.g. "numerics.time_nodes"
    std::vector<double> sweep_values;
};

namespace detail {

inline Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParameterError("scenario: expected [x,y,z]");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_vec(const json& j, const char* key, Vec3& out) {
    if (j.contains(key)) out = vec_from_json(j.at(key));
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        detail::read(d, "shape", s.domain_shape);
        detail::read_vec(d, "center", s.domain_center);
        detail::read(d, "radius", s.domain_radius);
        detail::read_vec(d, "semi_axes", s.ellipsoid_semi_axes);
        detail::read(d, "bumpy_amplitude", s.bumpy_amplitude);
        detail::read(d, "bumpy_degree", s.bumpy_degree);
    }
    if (j.contains("control_patch")) {
        const auto& p = j.at("control_patch");
        detail::read_vec(p, "axis", s.patch_axis);
        detail::read(p, "cos_threshold", s.patch_cos_threshold);
    }
    if (j.contains("gamma0")) {
        const auto& g = j.at("gamma0");
        detail::read_vec(g, "center", s.gamma0_center);
        detail::read(g, "radius", s.gamma0_radius);
        detail::read(g, "mesh_level", s.mesh_level);
    }
    if (j.contains("gamma1")) {
        const auto& g = j.at("gamma1");
        detail::read_vec(g, "center", s.gamma1_center);
        detail::read_vec(g, "scale", s.gamma1_scale);
    }
    if (j.contains("isotopy")) {
        const auto& i = j.at("isotopy");
        detail::read(i, "type", s.isotopy_type);
        detail::read(i, "tube_radius", s.tube_radius);
        if (i.contains("waypoints")) {
            for (const auto& w : i.at("waypoints")) {
                IsotopyWaypoint wp;
                detail::read(w, "time", wp.time);
                detail::read_vec(w, "displacement", wp.displacement);
                detail::read_vec(w, "scaling", wp.scaling);
                s.waypoints.push_back(wp);
            }
        }
    }
    if (j.contains("u0")) {
        const auto& u = j.at("u0");
        detail::read(u, "type", s.u0_type);
        detail::read_vec(u, "center", s.u0_center);
        detail::read(u, "sigma", s.u0_sigma);
        detail::read_vec(u, "axis", s.u0_axis);
        detail::read(u, "amplitude_rel", s.u0_amplitude_rel);
    }
    if (j.contains("numerics")) {
        const auto& n = j.at("numerics");
        auto& m = s.numerics;
        detail::read(n, "ball_radius", m.ball_radius);
        detail::read(n, "time_nodes", m.time_nodes);
        detail::read(n, "steps_per_node", m.steps_per_node);
        detail::read(n, "marker_spacing", m.marker_spacing);
        detail::read(n, "nu_factor", m.nu_factor);
        detail::read(n, "tol", m.tol);
        detail::read(n, "max_iter", m.max_iter);
        detail::read(n, "damping", m.damping);
        detail::read(n, "mu_delta", m.mu_delta);
        detail::read(n, "cbar", m.cbar);
        detail::read(n, "rho_override", m.rho_override);
        detail::read(n, "lattice_per_axis", m.lattice_per_axis);
        detail::read(n, "advect_steps", m.advect_steps);
        detail::read(n, "trajectory_snapshots", m.trajectory_snapshots);
        detail::read(n, "core_radius", m.core_radius);
        detail::read(n, "residual_dt", m.residual_dt);
        detail::read(n, "residual_h", m.residual_h);
        detail::read(n, "residual_probes", m.residual_probes);
        auto& c = m.synthesis;
        detail::read(n, "variation_tol", c.variation_tol);
        detail::read(n, "sample_stride", c.sample_stride);
        detail::read(n, "gamma_pole_count", c.gamma_pole_count);
        detail::read(n, "gamma_pole_offset", c.gamma_pole_offset);
        detail::read(n, "domain_boundary_level", c.domain_boundary_level);
        detail::read(n, "domain_pole_count", c.domain_pole_count);
        detail::read(n, "domain_pole_offset", c.domain_pole_offset);
        detail::read(n, "smallness_weight", c.smallness_weight);
        detail::read(n, "eta", c.eta);
        detail::read(n, "schedule_steps_per_unit", c.schedule_steps_per_unit);
        detail::read(n, "use_cap_basis", c.use_cap_basis);
        detail::read(n, "control_ridge", c.control_ridge);
        detail::read(n, "interior_weight", c.interior_weight);
        detail::read(n, "refinement_rounds", c.refinement_rounds);
        detail::read(n, "refinement_tol", c.refinement_tol);
        detail::read(n, "refinement_ridge_decay", c.refinement_ridge_decay);
        detail::read(n, "refinement_vertex_stride", c.refinement_vertex_stride);
        detail::read(n, "refinement_steps_per_unit", c.refinement_steps_per_unit);
        detail::read(n, "bump_stride", c.cap.bump_stride);
        detail::read(n, "bump_width_factor", c.cap.bump_width_factor);
        detail::read(n, "wall_weight", c.cap.wall_weight);
        detail::read(n, "seal_correction_rounds", c.cap.seal_correction_rounds);
    }
    if (j.contains("acceptance"))
        detail::read(j.at("acceptance"), "max_hausdorff_rel", s.max_hausdorff_rel);
    detail::read(j, "seed", s.seed);
    if (j.contains("sweep")) {
        detail::read(j.at("sweep"), "parameter", s.sweep_parameter);
        if (j.at("sweep").contains("values"))
            for (const auto& v : j.at("sweep").at("values"))
                s.sweep_values.push_back(v.get<double>());
    }
    return s;
}

/// Full echo of the resolved configuration (defaults included).
inline json scenario_to_json(const Scenario& s) {
    json j;
    j["domain"] = {{"shape", s.domain_shape},
                   {"center", detail::vec_to_json(s.domain_center)},
                   {"radius", s.domain_radius},
                   {"semi_axes", detail::vec_to_json(s.ellipsoid_semi_axes)},
                   {"bumpy_amplitude", s.bumpy_amplitude},
                   {"bumpy_degree", s.bumpy_degree}};
    j["control_patch"] = {{"axis", detail::vec_to_json(s.patch_axis)},
                          {"cos_threshold", s.patch_cos_threshold}};
    j["gamma0"] = {{"center", detail::vec_to_json(s.gamma0_center)},
                   {"radius", s.gamma0_radius},
                   {"mesh_level", s.mesh_level}};
    j["gamma1"] = {{"center", detail::vec_to_json(s.gamma1_center)},
                   {"scale", detail::vec_to_json(s.gamma1_scale)}};
    json wps = json::array();
    for (const auto& w : s.waypoints)
        wps.push_back({{"time", w.time},
                       {"displacement", detail::vec_to_json(w.displacement)},
                       {"scaling", detail::vec_to_json(w.scaling)}});
    j["isotopy"] = {{"type", s.isotopy_type}, {"tube_radius", s.tube_radius}, {"waypoints", wps}};
    j["u0"] = {{"type", s.u0_type},
               {"center", detail::vec_to_json(s.u0_center)},
               {"sigma", s.u0_sigma},
               {"axis", detail::vec_to_json(s.u0_axis)},
               {"amplitude_rel", s.u0_amplitude_rel}};
    const auto& m = s.numerics;
    const auto& c = m.synthesis;
    j["numerics"] = {{"ball_radius", m.ball_radius},
                     {"time_nodes", m.time_nodes},
                     {"steps_per_node", m.steps_per_node},
                     {"marker_spacing", m.marker_spacing},
                     {"nu_factor", m.nu_factor},
                     {"tol", m.tol},
                     {"max_iter", m.max_iter},
                     {"damping", m.damping},
                     {"mu_delta", m.mu_delta},
                     {"cbar", m.cbar},
                     {"rho_override", m.rho_override},
                     {"lattice_per_axis", m.lattice_per_axis},
                     {"advect_steps", m.advect_steps},
                     {"trajectory_snapshots", m.trajectory_snapshots},
                     {"core_radius", m.core_radius},
                     {"residual_dt", m.residual_dt},
                     {"residual_h", m.residual_h},
                     {"residual_probes", m.residual_probes},
                     {"variation_tol", c.variation_tol},
                     {"sample_stride", c.sample_stride},
                     {"gamma_pole_count", c.gamma_pole_count},
                     {"gamma_pole_offset", c.gamma_pole_offset},
                     {"domain_boundary_level", c.domain_boundary_level},
                     {"domain_pole_count", c.domain_pole_count},
                     {"domain_pole_offset", c.domain_pole_offset},
                     {"smallness_weight", c.smallness_weight},
                     {"eta", c.eta},
                     {"schedule_steps_per_unit", c.schedule_steps_per_unit},
                     {"use_cap_basis", c.use_cap_basis},
                     {"control_ridge", c.control_ridge},
                     {"interior_weight", c.interior_weight},
                     {"refinement_rounds", c.refinement_rounds},
                     {"refinement_tol", c.refinement_tol},
                     {"refinement_ridge_decay", c.refinement_ridge_decay},
                     {"refinement_vertex_stride", c.refinement_vertex_stride},
                     {"refinement_steps_per_unit", c.refinement_steps_per_unit},
                     {"bump_stride", c.cap.bump_stride},
                     {"bump_width_factor", c.cap.bump_width_factor},
                     {"wall_weight", c.cap.wall_weight},
                     {"seal_correction_rounds", c.cap.seal_correction_rounds}};
    j["acceptance"] = {{"max_hausdorff_rel", s.max_hausdorff_rel}};
    j["seed"] = s.seed;
    if (!s.sweep_parameter.empty())
        j["sweep"] = {{"parameter", s.sweep_parameter}, {"values", s.sweep_values}};
    return j;
}

/// Instantiate the meshes, domain, isotopy and initial field of a scenario.
inline EulerScenario build_scenario(const Scenario& s) {
    EulerScenario out;
    const ControlPatch patch{s.patch_axis, s.patch_cos_threshold};
    if (s.domain_shape == "ball") {
        out.domain = DomainSpec(s.domain_center, DomainSpec::Ball{s.domain_radius}, patch);
    } else if (s.domain_shape == "ellipsoid") {
        out.domain = DomainSpec(s.domain_center, DomainSpec::Ellipsoid{s.ellipsoid_semi_axes}, patch);
    } else if (s.domain_shape == "bumpy_ball") {
        out.domain = DomainSpec(
            s.domain_center, DomainSpec::BumpyBall{s.domain_radius, s.bumpy_amplitude, s.bumpy_degree},
            patch);
    } else {
        throw ParameterError("scenario: unknown domain shape '" + s.domain_shape + "'");
    }

    out.gamma0 = mesh_sphere(s.gamma0_center, s.gamma0_radius, s.mesh_level);
    out.gamma1 = mesh_sphere(s.gamma1_center, s.gamma0_radius, s.mesh_level);
    for (auto& v : out.gamma1.vertices)
        v = s.gamma1_center + s.gamma1_scale.cwiseProduct(v - s.gamma1_center);

    if (s.isotopy_type == "translation") {
        out.isotopy = build_translation_isotopy(out.gamma0, s.gamma1_center - s.gamma0_center,
                                                out.domain, s.tube_radius);
    } else if (s.isotopy_type == "composite") {
        std::vector<IsotopyWaypoint> wps = s.waypoints;
        if (wps.empty()) {
            IsotopyWaypoint wp;
            wp.time = 1.0;
            wp.displacement = s.gamma1_center - s.gamma0_center;
            wp.scaling = s.gamma1_scale;
            wps.push_back(wp);
        }
        out.isotopy = build_composite_isotopy(out.gamma0, wps, out.domain, s.tube_radius);
    } else {
        throw ParameterError("scenario: unknown isotopy type '" + s.isotopy_type + "'");
    }

    if (s.u0_type == "zero") {
        out.u0_zero = true;
    } else if (s.u0_type == "curl_bump") {
        out.u0_zero = false;
        const Vec3 center = s.u0_center;
        const double sigma = s.u0_sigma;
        const Vec3 axis = s.u0_axis;
        // u = grad(g) x a with a gaussian g: solenoidal, effectively compact
        auto value = [center, sigma, axis](double, const Vec3& p) {
            const Vec3 q = p - center;
            const double r2 = q.squaredNorm() / (2.0 * sigma * sigma);
            if (r2 > 30.0) return Vec3(Vec3::Zero());
            const double g = std::exp(-r2);
            return Vec3((-(q / (sigma * sigma)) * g).cross(axis));
        };
        out.u0 = FieldHandle(value);
        out.u0_support.absorb(center - Vec3::Constant(3.5 * sigma));
        out.u0_support.absorb(center + Vec3::Constant(3.5 * sigma));
        out.u0_scale_to_ybar = s.u0_amplitude_rel;
    } else {
        throw ParameterError("scenario: unknown u0 type '" + s.u0_type + "'");
    }
    out.numerics = s.numerics;
    out.numerics.seed = s.seed;
    return out;
}

}  // namespace lagflow
