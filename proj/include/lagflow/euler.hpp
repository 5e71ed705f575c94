// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lagflow/advect.hpp"
#include "lagflow/control.hpp"
#include "lagflow/core.hpp"
#include "lagflow/diagnostics.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"
#include "lagflow/fixed_point.hpp"
#include "lagflow/isotopy.hpp"
#include "lagflow/markers.hpp"
#include "lagflow/mesh.hpp"
#include "lagflow/surface_distance.hpp"

namespace lagflow {

struct EulerNumerics {
    SynthesisConfig synthesis;
    double ball_radius = 0.0;     // R; 0: 1.5 x max domain extent
    int time_nodes = 33;          // fixed-point time sampling
    int steps_per_node = 3;       // RK4 substeps of the marker transport per node
    double marker_spacing = 0.0;  // 0: u0 support radius / 6
    double nu_factor = 0.5;       // X_nu radius as a fraction of ||ybar||
    double tol = 1e-4;
    int max_iter = 20;
    double damping = 1.0;
    double mu_delta = 0.1;
    double cbar = 0.0;            // empirical smallness threshold; 0 disables rescaling
    double rho_override = 0.0;    // force a specific rho in (0,1]
    int lattice_per_axis = 8;     // residual lattice resolution
    int advect_steps = 400;       // RK4 steps for the surface advection
    int trajectory_snapshots = 32;
    double core_radius = 0.0;     // Biot-Savart regularization; 0: 2 x marker spacing
    double compatibility_tol = 1e-5;
    double residual_dt = 0.004;   // Euler-residual instrument steps
    double residual_h = 0.02;
    int residual_probes = 40;
    std::uint64_t seed = 20110817;
};

struct EulerScenario {
    DomainSpec domain{Vec3::Zero(), DomainSpec::Ball{1.0}};
    TriangulatedSurface gamma0;
    TriangulatedSurface gamma1;
    DivFreeIsotopyField isotopy;
    FieldHandle u0;
    bool u0_zero = true;
    BoundingBox u0_support;       // marker seeding region (ignored when u0 is zero)
    double u0_scale_to_ybar = 0;  // >0: rescale u0 so its sup equals this x ||ybar||
    EulerNumerics numerics;
};

struct EulerRunResult {
    TimePartitionedControl control;
    SynthesisReport synthesis;
    PicardResult picard;
    double rho = 1.0;
    double u0_norm = 0.0;
    double ybar_norm = 0.0;
    std::vector<double> snapshot_times;  // in [0, rho]
    std::vector<TriangulatedSurface> trajectory;
    std::vector<double> volume_series;
    SurfaceDistance final_distance;
    ContainmentVerdict containment;
    GronwallVerdict gronwall;
    EulerResidualReport euler_res;
    std::size_t marker_count = 0;
};

namespace detail {

inline std::vector<Vec3> interior_lattice(const DomainSpec& domain, int per_axis, double margin) {
    std::vector<Vec3> pts;
    const double r = domain.max_radius();
    const Vec3 lo = domain.center() - Vec3::Constant(r);
    const double h = 2.0 * r / (per_axis + 1);
    for (int i = 1; i <= per_axis; ++i)
        for (int j = 1; j <= per_axis; ++j)
            for (int k = 1; k <= per_axis; ++k) {
                const Vec3 x = lo + h * Vec3(i, j, k);
                if (domain.clearance(x) > margin) pts.push_back(x);
            }
    return pts;
}

}  // namespace detail

/// Necessary-condition validation: equal enclosed volumes (within 1%), valid
/// genus-0 meshes, and (for nonzero data) a solenoidal initial field tangent
/// to the sealed boundary.
inline void validate_scenario(const EulerScenario& sc) {
    validate_surface(sc.gamma0);
    validate_surface(sc.gamma1);
    const double v0 = enclosed_volume(sc.gamma0);
    const double v1 = enclosed_volume(sc.gamma1);
    if (std::abs(v0 - v1) > 0.01 * std::max(v0, v1))
        throw CompatibilityError(
            "scenario: gamma0 and gamma1 must enclose the same volume (within 1%)");
    for (const auto& v : sc.gamma0.vertices)
        if (!sc.domain.contains(v)) throw GeometryError("scenario: gamma0 leaves the domain");
    for (const auto& v : sc.gamma1.vertices)
        if (!sc.domain.contains(v)) throw GeometryError("scenario: gamma1 leaves the domain");

    if (!sc.u0_zero) {
        // spot-check div u0 = 0 and u0 . n = 0 on the sealed boundary
        SplitMix64 rng(sc.numerics.seed ^ 0x5eedULL);
        double scale = 0.0, vmax = 0.0;
        std::vector<std::pair<Vec3, double>> divs;
        for (int i = 0; i < 64; ++i) {
            Vec3 x = rng.point_in_box(sc.u0_support.lo, sc.u0_support.hi);
            if (!sc.domain.contains(x, 0.05 * sc.domain.max_radius())) continue;
            const Mat3 j = field_gradient(sc.u0, 0.0, x, 1e-5);
            divs.emplace_back(x, std::abs(j.trace()));
            scale = std::max(scale, j.norm());
            vmax = std::max(vmax, Vec3(sc.u0(0.0, x)).norm());
        }
        for (const auto& [x, d] : divs)
            if (scale > 0.0 && d > 1e-5 * scale)
                throw CompatibilityError("scenario: u0 is not divergence-free at sample points");
        const BoundarySampleSet bd =
            sc.domain.boundary_samples(sc.numerics.synthesis.domain_boundary_level);
        for (std::size_t i = 0; i < bd.size(); ++i)
            if (bd.tags[i] == BoundaryRegion::sealed_boundary &&
                std::abs(Vec3(sc.u0(0.0, bd.points[i])).dot(bd.normals[i])) > 1e-8 * std::max(vmax, 1e-30))
                throw CompatibilityError("scenario: u0 is not tangent on the sealed boundary");
    }
}

/// Full Theorem-1 pipeline at desk scale: synthesize the potential control for
/// the zero-data problem, rescale the initial data under the smallness
/// threshold, run the damped Picard iteration, rescale time back, advect the
/// surface under the resulting field and report every diagnostic.
inline EulerRunResult solve_controlled_euler(const EulerScenario& sc) {
    validate_scenario(sc);
    const EulerNumerics& num = sc.numerics;
    EulerRunResult out;

    // potential control for the zero-data problem
    auto domain_solver = make_domain_solver(sc.domain, num.synthesis);
    {
        auto [control, report] =
            synthesize_control(sc.isotopy, sc.gamma0, sc.domain, num.synthesis, domain_solver);
        out.control = std::move(control);
        out.synthesis = std::move(report);
    }

    // norms on the working lattice (clear of the near-wall shell, where the
    // synthesized control may carry large admissible-but-parasitic structure)
    const std::vector<Vec3> lattice =
        detail::interior_lattice(sc.domain, num.lattice_per_axis, 0.25 * sc.domain.max_radius());
    std::vector<double> coarse_times;
    for (int i = 0; i <= 16; ++i) coarse_times.push_back(i / 16.0);
    auto ybar_handle = FieldHandle::wrap(out.control);
    for (double t : coarse_times)
        for (const auto& x : lattice) {
            out.ybar_norm = std::max(out.ybar_norm, Vec3(ybar_handle(t, x)).norm());
            if (!sc.u0_zero) out.u0_norm = std::max(out.u0_norm, Vec3(sc.u0(0.0, x)).norm());
        }

    // optional amplitude coupling: u0 scaled to a fraction of the control norm
    FieldHandle u0 = sc.u0;
    if (!sc.u0_zero && sc.u0_scale_to_ybar > 0.0 && out.u0_norm > 0.0) {
        const double factor = sc.u0_scale_to_ybar * out.ybar_norm / out.u0_norm;
        auto inner = std::make_shared<FieldHandle>(sc.u0);
        u0 = FieldHandle(
            [inner, factor](double t, const Vec3& x) { return Vec3(factor * (*inner)(t, x)); },
            [inner, factor](double t, const Vec3& x) {
                return Mat3(factor * inner->gradient(t, x));
            });
        out.u0_norm *= factor;
    }

    out.rho = 1.0;
    if (num.rho_override > 0.0) {
        out.rho = num.rho_override;
    } else if (!sc.u0_zero && num.cbar > 0.0 && out.u0_norm > num.cbar) {
        out.rho = num.cbar / out.u0_norm;
    }

    // rescaled initial data v0 = rho u0
    FieldHandle v0 = u0;
    if (!sc.u0_zero && out.rho != 1.0) {
        auto inner = std::make_shared<FieldHandle>(u0);
        const double rho = out.rho;
        v0 = FieldHandle(
            [inner, rho](double t, const Vec3& x) { return Vec3(rho * (*inner)(t, x)); },
            [inner, rho](double t, const Vec3& x) { return Mat3(rho * inner->gradient(t, x)); });
    }

    // fixed-point context
    PicardContext ctx;
    ctx.domain = sc.domain;
    ctx.ball_radius = num.ball_radius > 0.0
                          ? num.ball_radius
                          : 1.5 * (sc.domain.max_radius() + sc.domain.center().norm());
    ctx.boundary = domain_solver;
    ctx.ybar = out.control;
    ctx.u0 = v0;
    ctx.u0_zero = sc.u0_zero;
    ctx.mu = TimeCutoff(num.mu_delta);
    ctx.steps_per_node = num.steps_per_node;
    ctx.reconstruct_opts.core_radius = num.core_radius;
    ctx.reconstruct_opts.compatibility_tol = num.compatibility_tol;
    for (int j = 0; j < num.time_nodes; ++j)
        ctx.time_nodes.push_back(double(j) / (num.time_nodes - 1));
    ctx.lattice = lattice;

    if (!sc.u0_zero) {
        double spacing = num.marker_spacing;
        if (spacing <= 0.0) spacing = sc.u0_support.extent().maxCoeff() / 12.0;
        const auto v0_ext = extend_field(v0, sc.domain, ctx.ball_radius);
        ctx.cloud0 = seed_markers(v0_ext, sc.u0_support, spacing);
        if (num.core_radius <= 0.0) ctx.reconstruct_opts.core_radius = 2.0 * spacing;
    }
    out.marker_count = ctx.cloud0.size();

    const double nu = num.nu_factor * std::max(out.ybar_norm, 1e-12);
    out.picard = picard_solve(ctx, nu, num.tol, num.max_iter, num.damping);

    // back to the original time scale and advect the tracked surface
    FieldHandle u_rho = time_rescale(out.picard.u_fixed, out.rho);
    const int snaps = std::max(2, num.trajectory_snapshots);
    const int steps_per_snap = std::max(1, num.advect_steps / snaps);
    out.trajectory.push_back(sc.gamma0);
    out.snapshot_times.push_back(0.0);
    out.volume_series.push_back(enclosed_volume(sc.gamma0));
    for (int k = 1; k <= snaps; ++k) {
        const double t0 = out.rho * double(k - 1) / snaps;
        const double t1 = out.rho * double(k) / snaps;
        TriangulatedSurface next =
            advect_surface(out.trajectory.back(), u_rho, t0, t1, steps_per_snap);
        out.snapshot_times.push_back(t1);
        out.volume_series.push_back(enclosed_volume(next));
        out.trajectory.push_back(std::move(next));
    }

    out.final_distance = surface_distance(out.trajectory.back(), sc.gamma1);
    out.containment = containment_check(out.trajectory, sc.domain);
    if (!out.containment.pass)
        throw GeometryError("solve_controlled_euler: surface left the domain near t = " +
                                std::to_string(out.snapshot_times[out.containment.worst_snapshot]),
                            out.snapshot_times[out.containment.worst_snapshot]);
    out.gronwall = gronwall_audit(out.picard.transport_log);

    // Euler-residual probes: working-region points, mid-node times.
    SplitMix64 rng(num.seed);
    std::vector<Vec3> probes;
    const double clear = std::max(2.0 * num.residual_h, 0.3 * sc.domain.max_radius());
    while (int(probes.size()) < num.residual_probes) {
        const Vec3 x = domain_random_point(sc.domain, rng);
        if (sc.domain.clearance(x) > clear) probes.push_back(x);
    }
    std::vector<double> probe_times;
    for (int j = 0; j < 5; ++j) probe_times.push_back(0.15 + 0.7 * j / 4.0);
    out.euler_res = euler_residual(out.picard.u_fixed, probes, probe_times, sc.domain,
                                   num.residual_dt, num.residual_h);
    return out;
}

}  // namespace lagflow
