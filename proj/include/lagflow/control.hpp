// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lagflow/advect.hpp"
#include "lagflow/bump.hpp"
#include "lagflow/cap_control.hpp"
#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/mesh.hpp"
#include "lagflow/neumann.hpp"
#include "lagflow/potential.hpp"

namespace lagflow {

struct Schedule {
    std::vector<double> times;
    std::vector<TriangulatedSurface> surfaces;
};

/// Adaptive bisection of [0,1]: intervals are split until the max vertex
/// displacement between consecutive snapshots is at most
/// variation_tol * domain_diameter. Returns the advected surface per snapshot.
template <VelocityField X>
Schedule sample_schedule(const X& field, const TriangulatedSurface& gamma0, double variation_tol,
                         double domain_diameter, int steps_per_unit_time = 128,
                         int max_snapshots = 10000) {
    if (variation_tol <= 0.0) throw ParameterError("sample_schedule: variation_tol must be > 0");
    const double tol = variation_tol * domain_diameter;

    const auto max_displacement = [](const TriangulatedSurface& a, const TriangulatedSurface& b) {
        double m = 0.0;
        for (std::size_t v = 0; v < a.vertices.size(); ++v)
            m = std::max(m, (a.vertices[v] - b.vertices[v]).norm());
        return m;
    };
    const auto advect_between = [&](const TriangulatedSurface& s, double t0, double t1) {
        const int steps = std::max(4, int(std::ceil((t1 - t0) * steps_per_unit_time)));
        return advect_surface(s, field, t0, t1, steps);
    };

    std::map<double, TriangulatedSurface> snaps;
    snaps.emplace(0.0, gamma0);
    snaps.emplace(1.0, advect_between(gamma0, 0.0, 1.0));

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = snaps.begin(); std::next(it) != snaps.end(); ++it) {
            const auto next = std::next(it);
            if (max_displacement(it->second, next->second) > tol) {
                if (snaps.size() >= std::size_t(max_snapshots))
                    throw ConvergenceError("sample_schedule: refinement overflow", {});
                const double mid = 0.5 * (it->first + next->first);
                snaps.emplace(mid, advect_between(it->second, it->first, mid));
                changed = true;
                break;
            }
        }
    }

    Schedule out;
    if (snaps.size() == 2 && max_displacement(snaps.begin()->second, snaps.rbegin()->second) <
                                 1e-14 * (domain_diameter > 0 ? domain_diameter : 1.0)) {
        out.times = {0.0};  // no motion: a single snapshot suffices
        out.surfaces = {gamma0};
        return out;
    }
    for (auto& [t, s] : snaps) {
        out.times.push_back(t);
        out.surfaces.push_back(std::move(s));
    }
    return out;
}

/// Boundary-supported potential control theta(t,x) = sum_i chi_i(t) psi_i(x):
/// a time partition of unity blending per-snapshot corrected potentials. The
/// velocity is grad(theta), harmonic in x, with vanishing normal derivative
/// on the sealed boundary up to the reported seal tolerances.
class TimePartitionedControl {
  public:
    TimePartitionedControl() = default;
    TimePartitionedControl(TimePartition partition, std::vector<PointSourcePotential> potentials)
        : partition_(std::move(partition)), potentials_(std::move(potentials)) {
        if (partition_->size() != potentials_.size())
            throw ParameterError("TimePartitionedControl: size mismatch");
    }

    [[nodiscard]] std::size_t size() const { return potentials_.size(); }
    [[nodiscard]] const TimePartition& partition() const { return *partition_; }
    [[nodiscard]] const std::vector<PointSourcePotential>& potentials() const { return potentials_; }

    [[nodiscard]] double theta(double t, const Vec3& x) const {
        if (potentials_.empty()) return 0.0;
        const auto w = partition_->weights(t);
        double v = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] != 0.0) v += w[i] * potentials_[i](x);
        return v;
    }

    [[nodiscard]] double theta_dt(double t, const Vec3& x) const {
        if (potentials_.empty()) return 0.0;
        const auto dw = partition_->weight_derivatives(t);
        double v = 0.0;
        for (std::size_t i = 0; i < dw.size(); ++i)
            if (dw[i] != 0.0) v += dw[i] * potentials_[i](x);
        return v;
    }

    /// Velocity grad_x theta.
    Vec3 operator()(double t, const Vec3& x) const {
        if (potentials_.empty()) return Vec3::Zero();
        const auto w = partition_->weights(t);
        Vec3 g = Vec3::Zero();
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] != 0.0) g += w[i] * potentials_[i].gradient(x);
        return g;
    }

    [[nodiscard]] Mat3 gradient(double t, const Vec3& x) const {
        Mat3 h = Mat3::Zero();
        if (potentials_.empty()) return h;
        const auto w = partition_->weights(t);
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] != 0.0) h += w[i] * potentials_[i].hessian(x);
        return h;
    }

  private:
    std::optional<TimePartition> partition_;
    std::vector<PointSourcePotential> potentials_;
};

inline Vec3 evaluate_control(const TimePartitionedControl& control, double t, const Vec3& x) {
    return control(t, x);
}

struct SnapshotReport {
    double time = 0.0;
    double neumann_residual = 0.0;       // relative residual of the gamma(t_i) solve
    double approx_residual = 0.0;        // RMS gradient misfit on the match tube
    double approx_small_residual = 0.0;  // RMS wall flux of psi_hat before correction
    double seal_residual = 0.0;          // tol_seal after correction
    double flux_compat = 0.0;            // |surface flux of X| / (|X| * area)
    double control_norm = 0.0;           // max |g_j| of the cap control coefficients
    int pole_count = 0;
    double condition_number = 0.0;
};

struct SynthesisReport {
    std::vector<SnapshotReport> snapshots;
    double eta = 0.0;                       // tube half-width actually used
    double max_seal_residual = 0.0;
    double basis_seal_leak = 0.0;           // worst wall flux of a basis element
    double max_potential_variation = 0.0;   // max over consecutive snapshots of
                                            // RMS grad difference on the tube
    std::vector<double> round_miss;         // max vertex endpoint miss per round
};

struct SynthesisConfig {
    double variation_tol = 0.0125;   // snapshot spacing: motion per snapshot / diam
    int sample_stride = 1;           // use every k-th face of gamma(t) for the solves
    int gamma_pole_count = 0;        // 0: faces/stride/3
    double gamma_pole_offset = 0.0;  // 0: 0.5 * feature size
    int domain_boundary_level = 3;   // sampling of the domain boundary
    int domain_pole_count = 0;       // 0: 0.7 * samples (near shell)
    double domain_pole_offset = 0.0; // 0: 0.125 * feature size of the boundary
    double smallness_weight = 10.0;  // for the plain harmonic_approx route
    double eta = 0.0;                // 0: half the min clearance of the swept surface
    int schedule_steps_per_unit = 128;
    double truncation = 1e-12;
    double condition_limit = 1e14;
    // Runge step realized through the admissible cap-control basis (all
    // candidates are Neumann solutions driven through the control patch).
    bool use_cap_basis = true;
    CapControlOptions cap;
    double control_ridge = 1e-3;     // relative Tikhonov weight on the cap coefficients
    double interior_weight = 0.0;    // optional free-region velocity penalty
    // Endpoint-feedback refinement: re-advect a vertex probe under the current
    // control, fit each round's correction to the remaining vertexwise miss.
    // Resolves what a single least-squares round cannot reach at double
    // precision without driving the control amplitude into the wall.
    int refinement_rounds = 8;
    double refinement_tol = 1e-3;    // stop when max miss / diameter falls below
    double refinement_ridge_decay = 0.4;  // per-round ridge multiplier
    int refinement_vertex_stride = 4;
    int refinement_steps_per_unit = 160;
};

namespace detail {

/// Re-throws typed solver errors with the snapshot index prepended.
template <class Fn>
auto with_snapshot_context(std::size_t i, double t, Fn&& fn) {
    const std::string ctx = "snapshot " + std::to_string(i) + " (t = " + std::to_string(t) + "): ";
    try {
        return fn();
    } catch (const CompatibilityError& e) {
        throw CompatibilityError(ctx + e.what());
    } catch (const ConditioningError& e) {
        throw ConditioningError(ctx + e.what(), e.condition_number);
    } catch (const ParameterError& e) {
        throw ParameterError(ctx + e.what());
    } catch (const GeometryError& e) {
        throw GeometryError(ctx + e.what(), e.time);
    }
}

inline BoundarySampleSet strided_samples(const TriangulatedSurface& s, int stride) {
    BoundarySampleSet all = surface_samples(s);
    if (stride <= 1) return all;
    BoundarySampleSet out;
    double kept_area = 0.0;
    for (std::size_t f = 0; f < all.size(); f += std::size_t(stride)) {
        out.points.push_back(all.points[f]);
        out.normals.push_back(all.normals[f]);
        out.weights.push_back(all.weights[f]);
        out.tags.push_back(all.tags[f]);
        kept_area += all.weights[f];
    }
    const double scale = all.total_weight() / kept_area;
    for (auto& w : out.weights) w *= scale;
    return out;
}

}  // namespace detail

/// Shared domain-boundary machinery: samples, a two-shell exterior pole set
/// (a near shell resolving wall-scale structure plus a sparser far shell for
/// the smooth far field), and one factorization reused by every solve.
inline std::shared_ptr<NeumannSolver> make_domain_solver(const DomainSpec& domain,
                                                         const SynthesisConfig& config = {}) {
    const BoundarySampleSet domain_samples = domain.boundary_samples(config.domain_boundary_level);
    const double feature = std::sqrt(domain_samples.total_weight() / (4.0 * pi));
    const double near_offset =
        config.domain_pole_offset > 0.0 ? config.domain_pole_offset : 0.125 * feature;
    const int near_count = config.domain_pole_count > 0 ? config.domain_pole_count
                                                        : int(domain_samples.size() * 0.7);
    const int far_count = std::max(32, near_count / 4);
    if (std::size_t(near_count + far_count + 4) > domain_samples.size())
        throw ParameterError("make_domain_solver: pole count exceeds boundary samples");
    PolePlacement poles = place_poles(domain, PoleSide::outside, near_offset, near_count);
    const PolePlacement far = place_poles(domain, PoleSide::outside, 0.5 * feature, far_count);
    poles.points.insert(poles.points.end(), far.points.begin(), far.points.end());
    NeumannOptions domain_opts;
    domain_opts.truncation = config.truncation;
    domain_opts.condition_limit = config.condition_limit;
    return std::make_shared<NeumannSolver>(domain_samples, poles.points, domain_opts);
}

/// Proposition-2.2 pipeline: for each snapshot solve the interior Neumann
/// problem on gamma(t_i) with flux X.nu, extend it to a potential harmonic on
/// the whole domain that is small near the sealed boundary (Runge step), then
/// correct the residual boundary flux; blend the results with a smooth time
/// partition of unity.
template <VelocityField X>
std::pair<TimePartitionedControl, SynthesisReport> synthesize_control(
    const X& field, const TriangulatedSurface& gamma0, const DomainSpec& domain,
    const SynthesisConfig& config = {},
    std::shared_ptr<const NeumannSolver> shared_solver = nullptr) {
    const Schedule schedule = sample_schedule(field, gamma0, config.variation_tol,
                                              domain.diameter(), config.schedule_steps_per_unit);
    const std::size_t n = schedule.times.size();

    // Tube half-width: half the minimum clearance of the swept surface.
    double eta = config.eta;
    if (eta <= 0.0) {
        double min_clear = std::numeric_limits<double>::max();
        for (const auto& s : schedule.surfaces)
            for (const auto& v : s.vertices) min_clear = std::min(min_clear, domain.clearance(v));
        if (min_clear <= 0.0)
            throw GeometryError("synthesize_control: swept surface touches the boundary");
        eta = 0.5 * min_clear;
    }

    if (!shared_solver) shared_solver = make_domain_solver(domain, config);
    const NeumannSolver& domain_solver = *shared_solver;
    const BoundarySampleSet& domain_samples = domain_solver.samples();
    const std::vector<Vec3>& outer_pole_points = domain_solver.poles();
    NeumannOptions domain_opts;
    domain_opts.truncation = config.truncation;
    domain_opts.condition_limit = config.condition_limit;

    // Small region: collar of the sealed boundary, depth eta/2 (plain route).
    std::vector<Vec3> small_region;
    for (std::size_t i = 0; i < domain_samples.size(); ++i) {
        if (domain_samples.tags[i] != BoundaryRegion::sealed_boundary) continue;
        small_region.push_back(domain_samples.points[i]);
        small_region.push_back(domain_samples.points[i] -
                               (0.5 * eta) * domain_samples.normals[i]);
    }

    std::unique_ptr<CapControlBasis> cap_basis;
    if (config.use_cap_basis) {
        cap_basis = std::make_unique<CapControlBasis>(shared_solver, domain, config.cap);
        if (config.interior_weight > 0.0) {
            // free-region lattice: inside the domain, clear of the wall and of
            // every scheduled surface position
            std::vector<Vec3> tube_pts;
            for (const auto& s : schedule.surfaces)
                for (std::size_t f = 0; f < s.face_count(); f += 8)
                    tube_pts.push_back(s.face_centroid(f));
            std::vector<Vec3> free_pts;
            const double wall_clear = 0.1 * domain.max_radius();
            SplitMix64 rng(0x1a77);
            while (free_pts.size() < 400) {
                const Vec3 p = domain_random_point(domain, rng);
                if (domain.clearance(p) < wall_clear) continue;
                bool close = false;
                for (const auto& q : tube_pts)
                    if ((p - q).norm() < 1.5 * eta) { close = true; break; }
                if (!close) free_pts.push_back(p);
            }
            cap_basis->set_interior_regularization(std::move(free_pts), config.interior_weight);
        }
    }

    // Partition of unity over the snapshot times (needed by the feedback
    // rounds below as well as the final assembly).
    std::vector<double> half_widths(n);
    if (n == 1) {
        half_widths[0] = 1.25;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? schedule.times[i] - schedule.times[i - 1]
                                      : schedule.times[i + 1] - schedule.times[i];
            const double right = i + 1 < n ? schedule.times[i + 1] - schedule.times[i]
                                           : schedule.times[i] - schedule.times[i - 1];
            half_widths[i] = 0.75 * std::max(left, right);
        }
        half_widths.front() = std::max(half_widths.front(), 1e-3);
        half_widths.back() = std::max(half_widths.back(), 1e-3);
    }
    const TimePartition partition(schedule.times, half_widths);

    std::vector<PointSourcePotential> potentials(n);
    SynthesisReport report;
    report.eta = eta;
    report.snapshots.resize(n);
    if (cap_basis) report.basis_seal_leak = cap_basis->max_seal_leak();

    for (std::size_t i = 0; i < n; ++i) {
        const double t = schedule.times[i];
        const TriangulatedSurface& gamma = schedule.surfaces[i];
        SnapshotReport& snap = report.snapshots[i];
        snap.time = t;

        BoundarySampleSet samples = detail::strided_samples(gamma, config.sample_stride);
        std::vector<double> flux(samples.size());
        double flux_sum = 0.0, speed_scale = 0.0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const Vec3 v = field(t, samples.points[k]);
            flux[k] = v.dot(samples.normals[k]);
            flux_sum += samples.weights[k] * flux[k];
            speed_scale = std::max(speed_scale, v.norm());
        }
        snap.flux_compat = speed_scale > 0.0
                               ? std::abs(flux_sum) / (speed_scale * samples.total_weight())
                               : 0.0;

        const double gamma_offset = config.gamma_pole_offset > 0.0
                                        ? config.gamma_pole_offset
                                        : 0.5 * feature_size(gamma);
        const int gamma_poles =
            config.gamma_pole_count > 0 ? config.gamma_pole_count : int(samples.size() / 3);
        const PolePlacement inner_poles =
            place_poles(gamma, PoleSide::outside, gamma_offset, gamma_poles);

        NeumannOptions gamma_opts = domain_opts;
        PointSourcePotential psi = detail::with_snapshot_context(i, t, [&] {
            auto [p, rep] = NeumannSolver(samples, inner_poles.points, gamma_opts).solve(flux);
            snap.neumann_residual = rep.relative_residual;
            return p;
        });

        // Match region: the gamma tube, sample points offset by {-eta/2, 0, +out}.
        // The outward offset stays clear of the target's pole shell, where its
        // harmonic extension is no longer represented.
        const double out_offset = std::min(0.5 * eta, 0.6 * gamma_offset);
        std::vector<Vec3> match_region;
        match_region.reserve(3 * samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) {
            match_region.push_back(samples.points[k]);
            match_region.push_back(samples.points[k] + out_offset * samples.normals[k]);
            match_region.push_back(samples.points[k] - (0.5 * eta) * samples.normals[k]);
        }

        potentials[i] = detail::with_snapshot_context(i, t, [&] {
            PointSourcePotential psi_hat;
            if (cap_basis) {
                std::vector<Vec3> target_grads(match_region.size());
                for (std::size_t k = 0; k < match_region.size(); ++k)
                    target_grads[k] = psi.gradient(match_region[k]);
                auto [fit, fit_rep] =
                    cap_basis->fit(match_region, target_grads, config.control_ridge);
                psi_hat = std::move(fit);
                snap.approx_residual = fit_rep.match_residual;
                snap.approx_small_residual = fit_rep.wall_flux_max;
                snap.control_norm = fit_rep.control_norm;
                snap.condition_number = fit_rep.condition;
            } else {
                auto [fit, approx_rep] =
                    harmonic_approx(psi, match_region, small_region, outer_pole_points,
                                    config.smallness_weight, domain.diameter(), gamma_opts);
                psi_hat = std::move(fit);
                snap.approx_residual = approx_rep.match_residual;
                snap.approx_small_residual = approx_rep.small_residual;
                snap.condition_number = approx_rep.condition;
            }
            snap.pole_count = int(outer_pole_points.size());

            if (cap_basis) {
                // The admissible basis already realizes the corrected potential:
                // every element is a Neumann solution with (near-)zero sealed
                // flux, so the subtraction step is built in. Running the
                // unconstrained correction here would re-solve the full wall
                // pattern and perturb the interior far more than the transport
                // error it removes.
                double worst = 0.0;
                for (std::size_t k = 0; k < domain_samples.size(); ++k)
                    if (domain_samples.tags[k] == BoundaryRegion::sealed_boundary)
                        worst = std::max(worst, std::abs(psi_hat.gradient(domain_samples.points[k])
                                                             .dot(domain_samples.normals[k])));
                snap.seal_residual = worst;
                return psi_hat;
            }
            auto [psi_check, corr_rep] = boundary_correction(psi_hat, domain_solver);
            snap.seal_residual = corr_rep.tol_seal;
            return psi_check;
        });
        report.max_seal_residual = std::max(report.max_seal_residual, snap.seal_residual);
    }

    // Endpoint-feedback refinement: advect a vertex probe under the current
    // control, compare against the X-advected oracle positions, and fit each
    // remaining miss as a small correction on the admissible basis. Every
    // round also sees (and repairs) whatever the boundary correction did to
    // the transport.
    if (cap_basis && config.refinement_rounds > 0 && n > 1) {
        const std::size_t stride = std::size_t(std::max(1, config.refinement_vertex_stride));
        std::vector<std::size_t> probe_ids;
        for (std::size_t v = 0; v < gamma0.vertex_count(); v += stride) probe_ids.push_back(v);

        // oracle endpoints under X itself
        const int oracle_steps = 4 * config.schedule_steps_per_unit;
        std::vector<Vec3> target_end(probe_ids.size());
        for (std::size_t k = 0; k < probe_ids.size(); ++k)
            target_end[k] = advect_point(field, gamma0.vertices[probe_ids[k]], 0.0, 1.0,
                                         oracle_steps);

        // probe normals per snapshot from the scheduled surfaces
        std::vector<std::vector<Vec3>> snap_normals(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto normals = schedule.surfaces[i].vertex_normals();
            snap_normals[i].resize(probe_ids.size());
            for (std::size_t k = 0; k < probe_ids.size(); ++k)
                snap_normals[i][k] = normals[probe_ids[k]];
        }

        const auto control_velocity = [&](double t, const Vec3& x) {
            const auto w = partition.weights(t);
            Vec3 g = Vec3::Zero();
            for (std::size_t i = 0; i < n; ++i)
                if (w[i] != 0.0) g += w[i] * potentials[i].gradient(x);
            return g;
        };

        for (int round = 0; round < config.refinement_rounds; ++round) {
            // trajectory of the probe vertices under the current control
            std::vector<std::vector<Vec3>> traj(n, std::vector<Vec3>(probe_ids.size()));
            for (std::size_t k = 0; k < probe_ids.size(); ++k)
                traj[0][k] = gamma0.vertices[probe_ids[k]];
            std::vector<Vec3> end(probe_ids.size());
#pragma omp parallel for schedule(static)
            for (long k = 0; k < long(probe_ids.size()); ++k) {
                Vec3 x = traj[0][k];
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    const double t0 = schedule.times[i], t1 = schedule.times[i + 1];
                    const int steps =
                        std::max(2, int(std::ceil((t1 - t0) * config.refinement_steps_per_unit)));
                    x = advect_point(control_velocity, x, t0, t1, steps);
                    traj[i + 1][k] = x;
                }
                // schedule may not end exactly at t = 1
                if (schedule.times.back() < 1.0)
                    x = advect_point(control_velocity, x, schedule.times.back(), 1.0,
                                     std::max(2, int(std::ceil((1.0 - schedule.times.back()) *
                                                               config.refinement_steps_per_unit))));
                end[k] = x;
            }

            double miss_max = 0.0;
            std::vector<Vec3> miss(probe_ids.size());
            for (std::size_t k = 0; k < probe_ids.size(); ++k) {
                miss[k] = target_end[k] - end[k];
                miss_max = std::max(miss_max, miss[k].norm());
            }
            report.round_miss.push_back(miss_max);
            if (miss_max < config.refinement_tol * domain.diameter()) break;

            // per-snapshot correction: demanded velocity equals the miss at the
            // probe's current position; the partition integrates it to one net
            // displacement over [0,1]
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<Vec3> pts, demand;
                pts.reserve(3 * probe_ids.size());
                for (std::size_t k = 0; k < probe_ids.size(); ++k) {
                    const Vec3& x = traj[i][k];
                    const Vec3& nrm = snap_normals[i][k];
                    for (double off : {0.0, 0.45 * eta, -0.45 * eta}) {
                        pts.push_back(x + off * nrm);
                        demand.push_back(miss[k]);
                    }
                }
                const double round_ridge =
                    config.control_ridge * std::pow(config.refinement_ridge_decay, round);
                const auto [delta, fit_rep] = cap_basis->fit(pts, demand, round_ridge);
                potentials[i].add(delta);  // shared poles: weights merge
            }
        }
    }

    // Refresh the per-snapshot seal residuals after the refinement rounds.
    if (cap_basis && !report.round_miss.empty()) {
        const BoundarySampleSet& bd = domain_solver.samples();
        for (std::size_t i = 0; i < n; ++i) {
            double worst = 0.0;
            for (std::size_t k = 0; k < bd.size(); ++k)
                if (bd.tags[k] == BoundaryRegion::sealed_boundary)
                    worst = std::max(worst,
                                     std::abs(potentials[i].gradient(bd.points[k]).dot(bd.normals[k])));
            report.snapshots[i].seal_residual = worst;
            report.max_seal_residual = std::max(report.max_seal_residual, worst);
        }
    }

    // Realized inter-snapshot potential variation on the tube (audit for the
    // motion-based schedule proxy).
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const BoundarySampleSet samples =
            detail::strided_samples(schedule.surfaces[i], config.sample_stride);
        double acc = 0.0;
        for (const auto& p : samples.points)
            acc += (potentials[i + 1].gradient(p) - potentials[i].gradient(p)).squaredNorm();
        report.max_potential_variation =
            std::max(report.max_potential_variation, std::sqrt(acc / double(samples.size())));
    }

    TimePartitionedControl control(partition, std::move(potentials));
    return {std::move(control), std::move(report)};
}

}  // namespace lagflow
