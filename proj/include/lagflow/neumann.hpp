// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"
#include "lagflow/linalg.hpp"
#include "lagflow/potential.hpp"

namespace lagflow {

struct NeumannReport {
    double residual = 0.0;           // weighted L2 residual of the normal-derivative fit
    double relative_residual = 0.0;  // residual / weighted L2 norm of the data
    double condition = 0.0;
    int rank = 0;
    int pole_count = 0;
};

struct NeumannOptions {
    double truncation = 1e-12;
    double condition_limit = 1e14;
    double compatibility_tol = 1e-8;
    bool include_linear = true;  // affine columns alongside the sources
};

/// Interior Neumann solver on a sampled closed surface by the method of
/// fundamental solutions: fit d(phi)/d(nu) = flux in the weighted least-squares
/// sense with sources at fixed exterior poles. The matrix depends only on the
/// sample/pole geometry, so one factorization serves any number of data sets.
class NeumannSolver {
  public:
    NeumannSolver(BoundarySampleSet samples, std::vector<Vec3> poles, NeumannOptions opts = {})
        : samples_(std::move(samples)), poles_(std::move(poles)), opts_(opts) {
        samples_.validate();
        const Eigen::Index m = Eigen::Index(samples_.size());
        const Eigen::Index np = Eigen::Index(poles_.size());
        const Eigen::Index n = np + (opts_.include_linear ? 3 : 0);
        if (m < n)
            throw ParameterError("NeumannSolver: fewer samples than unknowns");
        sqrt_w_.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) sqrt_w_[i] = std::sqrt(samples_.weights[i]);

        Eigen::MatrixXd a(m, n);
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < m; ++i) {
            const Vec3& x = samples_.points[i];
            const Vec3& nu = samples_.normals[i];
            for (Eigen::Index p = 0; p < np; ++p) {
                const Vec3 r = x - poles_[p];
                const double rn = r.norm();
                a(i, p) = -nu.dot(r) / (four_pi * rn * rn * rn) * sqrt_w_[i];
            }
            if (opts_.include_linear)
                for (int k = 0; k < 3; ++k) a(i, np + k) = nu[k] * sqrt_w_[i];
        }
        solver_ = std::make_unique<LeastSquaresSolver>(std::move(a), opts_.truncation,
                                                       opts_.condition_limit);
    }

    [[nodiscard]] const BoundarySampleSet& samples() const { return samples_; }
    [[nodiscard]] const std::vector<Vec3>& poles() const { return poles_; }
    [[nodiscard]] double condition() const { return solver_->condition(); }

    /// Solves for the potential with the given normal-derivative data. The
    /// gauge is fixed by zero weighted mean of the potential over the samples.
    [[nodiscard]] std::pair<PointSourcePotential, NeumannReport> solve(
        const std::vector<double>& flux) const {
        const Eigen::Index m = Eigen::Index(samples_.size());
        if (Eigen::Index(flux.size()) != m)
            throw ParameterError("NeumannSolver: flux size mismatch");

        const double area = samples_.total_weight();
        double mean = 0.0, l2 = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            mean += samples_.weights[i] * flux[i];
            l2 += samples_.weights[i] * flux[i] * flux[i];
        }
        l2 = std::sqrt(l2);
        if (std::abs(mean) > opts_.compatibility_tol * l2 * std::sqrt(area) &&
            l2 > 0.0)
            throw CompatibilityError("Neumann data has nonzero mean flux");

        Eigen::VectorXd b(m);
        for (Eigen::Index i = 0; i < m; ++i) b(i) = flux[i] * sqrt_w_[i];
        const LeastSquaresSolution sol = solver_->solve(b);

        PointSourcePotential phi;
        phi.poles = poles_;
        phi.weights.assign(sol.x.data(), sol.x.data() + poles_.size());
        if (opts_.include_linear)
            phi.linear = Vec3(sol.x(Eigen::Index(poles_.size())),
                              sol.x(Eigen::Index(poles_.size()) + 1),
                              sol.x(Eigen::Index(poles_.size()) + 2));
        double phi_mean = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) phi_mean += samples_.weights[i] * phi(samples_.points[i]);
        phi.constant = -phi_mean / area;

        NeumannReport rep;
        rep.residual = sol.residual_norm;
        rep.relative_residual = l2 > 0.0 ? sol.residual_norm / l2 : sol.residual_norm;
        rep.condition = sol.condition;
        rep.rank = sol.rank;
        rep.pole_count = int(poles_.size());
        return {std::move(phi), rep};
    }

  private:
    BoundarySampleSet samples_;
    std::vector<Vec3> poles_;
    NeumannOptions opts_;
    std::vector<double> sqrt_w_;
    std::unique_ptr<LeastSquaresSolver> solver_;
};

/// One-shot interior Neumann solve. Poles default to the spec layout: outside
/// the surface at half the local feature size, one pole per three samples.
inline std::pair<PointSourcePotential, NeumannReport> solve_neumann(
    const TriangulatedSurface& surface, const std::vector<double>& flux, int pole_count = 0,
    double pole_offset = 0.0, NeumannOptions opts = {}) {
    if (pole_offset <= 0.0) pole_offset = 0.5 * feature_size(surface);
    if (pole_count <= 0) pole_count = std::max(8, int(surface.face_count() / 3));
    const PolePlacement poles = place_poles(surface, PoleSide::outside, pole_offset, pole_count);
    return NeumannSolver(surface_samples(surface), poles.points, opts).solve(flux);
}

struct ApproxReport {
    double match_residual = 0.0;  // RMS gradient misfit over the match region
    double small_residual = 0.0;  // weighted RMS of value+gradient on the small region
    double condition = 0.0;
    int rank = 0;
};

/// Runge-type approximation: least-squares fit of a potential harmonic on the
/// whole domain (poles outside) to a target that is only harmonic near the
/// match region, with a penalty making it small near the sealed boundary.
/// Minimizes  sum_match |grad(phi) - grad(target)|^2
///          + weight * sum_small (|phi|^2 + |grad(phi)|^2).
inline std::pair<PointSourcePotential, ApproxReport> harmonic_approx(
    const PointSourcePotential& target, const std::vector<Vec3>& match_region,
    const std::vector<Vec3>& small_region, const std::vector<Vec3>& poles,
    double smallness_weight, double region_diameter = 0.0, NeumannOptions opts = {}) {
    if (match_region.empty()) throw ParameterError("harmonic_approx: empty match region");
    if (poles.size() < 4) throw ParameterError("harmonic_approx: needs at least 4 poles");
    if (smallness_weight < 0.0) throw ParameterError("harmonic_approx: negative weight");

    if (region_diameter <= 0.0) {
        BoundingBox box;
        for (const auto& p : match_region) box.absorb(p);
        for (const auto& p : small_region) box.absorb(p);
        region_diameter = box.diagonal();
    }
    const double clearance = 1e-3 * region_diameter;
    for (const auto& y : poles) {
        for (const auto& p : match_region)
            if ((y - p).norm() < clearance)
                throw ParameterError("harmonic_approx: pole touches match region");
        for (const auto& p : small_region)
            if ((y - p).norm() < clearance)
                throw ParameterError("harmonic_approx: pole touches small region");
    }

    const Eigen::Index np = Eigen::Index(poles.size());
    const Eigen::Index n = np + 4;  // sources, constant, linear
    const Eigen::Index m = 3 * Eigen::Index(match_region.size()) + 4 * Eigen::Index(small_region.size());
    const double sw = std::sqrt(smallness_weight);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    const Eigen::Index small_base = 3 * Eigen::Index(match_region.size());

#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < Eigen::Index(match_region.size()); ++i) {
        const Vec3& x = match_region[i];
        const Vec3 g = target.gradient(x);
        for (Eigen::Index p = 0; p < np; ++p) {
            const Vec3 r = x - poles[p];
            const double rn = r.norm();
            const Vec3 k = -r / (four_pi * rn * rn * rn);
            for (int c = 0; c < 3; ++c) a(3 * i + c, p) = k[c];
        }
        for (int c = 0; c < 3; ++c) {
            a(3 * i + c, np + 1 + c) = 1.0;  // gradient of linear part
            b(3 * i + c) = g[c];
        }
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < Eigen::Index(small_region.size()); ++i) {
        const Vec3& x = small_region[i];
        const Eigen::Index row = small_base + 4 * i;
        for (Eigen::Index p = 0; p < np; ++p) {
            const Vec3 r = x - poles[p];
            const double rn = r.norm();
            a(row, p) = sw / (four_pi * rn);
            const Vec3 k = -r / (four_pi * rn * rn * rn);
            for (int c = 0; c < 3; ++c) a(row + 1 + c, p) = sw * k[c];
        }
        a(row, np) = sw;  // constant
        for (int c = 0; c < 3; ++c) {
            a(row, np + 1 + c) = sw * x[c];
            a(row + 1 + c, np + 1 + c) = sw;
        }
    }

    // Truncation makes rank-deficient augmentations (zero smallness weight)
    // harmless, so no condition limit here; the raw number is still reported.
    const LeastSquaresSolution sol = solve_least_squares(std::move(a), b, opts.truncation);

    PointSourcePotential phi;
    phi.poles = poles;
    phi.weights.assign(sol.x.data(), sol.x.data() + poles.size());
    phi.constant = sol.x(np);
    phi.linear = Vec3(sol.x(np + 1), sol.x(np + 2), sol.x(np + 3));

    ApproxReport rep;
    double match2 = 0.0, small2 = 0.0;
    for (const auto& x : match_region) match2 += (phi.gradient(x) - target.gradient(x)).squaredNorm();
    for (const auto& x : small_region) {
        const double v = phi(x);
        small2 += v * v + phi.gradient(x).squaredNorm();
    }
    rep.match_residual = std::sqrt(match2 / double(match_region.size()));
    rep.small_residual =
        small_region.empty() ? 0.0 : std::sqrt(small2 / double(small_region.size()));
    rep.condition = sol.condition;
    rep.rank = sol.rank;
    return {std::move(phi), rep};
}

struct CorrectionReport {
    double tol_seal = 0.0;      // max |d(psi_check)/dn| over sealed samples
    double data_ratio = 0.0;    // ||d|| / ||grad(candidate).n|| over the boundary
    NeumannReport h_report;     // fit report of the correction potential
    bool trivial = false;       // no sealed samples: candidate returned unchanged
};

/// Boundary correction: remove the residual normal velocity of `candidate` on
/// the sealed part of the boundary. The data d equals d(candidate)/dn on
/// sealed samples and the unique constant on the control patch making the
/// weighted mean vanish; h solves the interior Neumann problem with data d and
/// the corrected potential is candidate - h.
inline std::pair<PointSourcePotential, CorrectionReport> boundary_correction(
    const PointSourcePotential& candidate, const NeumannSolver& domain_solver) {
    const BoundarySampleSet& bd = domain_solver.samples();
    double sealed_weight = 0.0, patch_weight = 0.0, sealed_flux = 0.0;
    for (std::size_t i = 0; i < bd.size(); ++i) {
        if (bd.tags[i] == BoundaryRegion::sealed_boundary) {
            sealed_weight += bd.weights[i];
            sealed_flux += bd.weights[i] * candidate.gradient(bd.points[i]).dot(bd.normals[i]);
        } else {
            patch_weight += bd.weights[i];
        }
    }

    CorrectionReport rep;
    if (sealed_weight == 0.0) {
        rep.trivial = true;
        return {candidate, rep};
    }
    if (patch_weight == 0.0)
        throw CompatibilityError("boundary_correction: control patch has no samples");

    std::vector<double> d(bd.size());
    const double patch_constant = -sealed_flux / patch_weight;
    double d2 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < bd.size(); ++i) {
        const double gn = candidate.gradient(bd.points[i]).dot(bd.normals[i]);
        d[i] = (bd.tags[i] == BoundaryRegion::sealed_boundary) ? gn : patch_constant;
        d2 += bd.weights[i] * d[i] * d[i];
        g2 += bd.weights[i] * gn * gn;
    }
    rep.data_ratio = g2 > 0.0 ? std::sqrt(d2 / g2) : 0.0;

    auto [h, h_rep] = domain_solver.solve(d);
    PointSourcePotential corrected = candidate;
    corrected.subtract(h);

    rep.h_report = h_rep;
    for (std::size_t i = 0; i < bd.size(); ++i)
        if (bd.tags[i] == BoundaryRegion::sealed_boundary)
            rep.tol_seal = std::max(
                rep.tol_seal, std::abs(corrected.gradient(bd.points[i]).dot(bd.normals[i])));
    return {std::move(corrected), rep};
}

/// First de Rham cohomology generators of the domain. Every supported shape is
/// simply connected (genus 0), so the basis is empty; multiply connected
/// domains are handled by injecting a precomputed basis downstream.
inline std::vector<FieldHandle> cohomology_basis(const DomainSpec&) { return {}; }

}  // namespace lagflow
