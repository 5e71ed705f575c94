// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/linalg.hpp"
#include "lagflow/neumann.hpp"
#include "lagflow/potential.hpp"

namespace lagflow {

struct CapControlOptions {
    int bump_stride = 1;           // every k-th control-patch sample seeds a bump
    double bump_width_factor = 1.6;  // gaussian width in units of the cap sample spacing
    double edge_taper_start = 0.55;  // taper begin, fraction of the cap angular radius
    double edge_taper_width = 0.40;  // taper width, same units
    int seal_correction_rounds = 0;  // per-field re-solves of the residual wall flux
    int wall_penalty_level = 4;      // sealed sampling used to penalize combined leak
    double wall_weight = 0.0;        // weight of the combined wall-flux rows in fits
};

/// Basis of admissible control fields: for each smooth bump of normal-velocity
/// data supported on the control patch (tapered against the patch edge, zero
/// mean), the interior Neumann solution on the shared domain factorization.
/// Every element has (iteratively corrected) near-zero flux through the sealed
/// boundary, so any combination honors the wall no matter how ill-conditioned
/// the downstream fit is. All elements share the solver's pole set, hence any
/// combination collapses to a single potential.
class CapControlBasis {
  public:
    CapControlBasis(std::shared_ptr<const NeumannSolver> solver, const DomainSpec& domain,
                    CapControlOptions opts = {})
        : solver_(std::move(solver)), opts_(opts) {
        const BoundarySampleSet& bd = solver_->samples();
        std::vector<std::size_t> cap_idx;
        double cap_area = 0.0;
        for (std::size_t i = 0; i < bd.size(); ++i)
            if (bd.tags[i] == BoundaryRegion::control_patch) {
                cap_idx.push_back(i);
                cap_area += bd.weights[i];
            }
        if (cap_idx.size() < 8)
            throw ParameterError("CapControlBasis: control patch has too few samples");
        const double spacing = std::sqrt(cap_area / double(cap_idx.size()));
        const double sigma = opts_.bump_width_factor * spacing;

        const Vec3 axis = domain.patch().axis.normalized();
        const double ang_max = std::acos(std::clamp(domain.patch().cos_threshold, -1.0, 1.0));
        const auto taper = [&](const Vec3& x) {
            const double ang = std::acos(
                std::clamp((x - domain.center()).normalized().dot(axis), -1.0, 1.0));
            return smooth_step_down((ang - opts_.edge_taper_start * ang_max) /
                                    (opts_.edge_taper_width * ang_max));
        };
        double taper_mass = 0.0;
        for (auto i : cap_idx) taper_mass += bd.weights[i] * taper(bd.points[i]);

        for (std::size_t jj = 0; jj < cap_idx.size(); jj += std::size_t(opts_.bump_stride)) {
            const Vec3 center = bd.points[cap_idx[jj]];
            if (taper(center) < 0.05) continue;  // skip centers on the patch edge
            std::vector<double> datum(bd.size(), 0.0);
            double mass = 0.0;
            for (auto i : cap_idx) {
                const double d = (bd.points[i] - center).norm();
                datum[i] = std::exp(-(d * d) / (sigma * sigma)) * taper(bd.points[i]);
                mass += bd.weights[i] * datum[i];
            }
            // compatibility: remove the mean with the same tapered profile so the
            // datum stays smooth and exactly zero off the patch
            for (auto i : cap_idx) datum[i] -= mass / taper_mass * taper(bd.points[i]);

            auto [field, rep] = solver_->solve(datum);
            max_fit_residual_ = std::max(max_fit_residual_, rep.relative_residual);

            // iterated seal correction: re-solve the realized wall flux
            for (int round = 0; round < opts_.seal_correction_rounds; ++round) {
                std::vector<double> leak(bd.size(), 0.0);
                double leak_sum = 0.0, patch_weight = 0.0;
                for (std::size_t i = 0; i < bd.size(); ++i) {
                    if (bd.tags[i] == BoundaryRegion::sealed_boundary) {
                        leak[i] = field.gradient(bd.points[i]).dot(bd.normals[i]);
                        leak_sum += bd.weights[i] * leak[i];
                    } else {
                        patch_weight += bd.weights[i] * taper(bd.points[i]);
                    }
                }
                // balance the mean inside the patch, tapered
                for (auto i : cap_idx) leak[i] = -leak_sum / patch_weight * taper(bd.points[i]);
                auto [h, h_rep] = solver_->solve(leak);
                field.subtract(h);  // shared poles: weights merge
            }
            double worst = 0.0;
            for (std::size_t i = 0; i < bd.size(); ++i)
                if (bd.tags[i] == BoundaryRegion::sealed_boundary)
                    worst = std::max(worst,
                                     std::abs(field.gradient(bd.points[i]).dot(bd.normals[i])));
            max_seal_leak_ = std::max(max_seal_leak_, worst);
            fields_.push_back(std::move(field));
        }
        if (fields_.size() < 4)
            throw ParameterError("CapControlBasis: too few admissible bumps survive the taper");

        // pole-weight matrix for fast collapsed evaluation: column j holds the
        // weights of field j, plus rows for (constant, linear xyz).
        const Eigen::Index np = Eigen::Index(solver_->poles().size());
        coeffs_.resize(np + 4, Eigen::Index(fields_.size()));
        for (std::size_t j = 0; j < fields_.size(); ++j) {
            for (Eigen::Index p = 0; p < np; ++p) coeffs_(p, Eigen::Index(j)) = fields_[j].weights[p];
            coeffs_(np, Eigen::Index(j)) = fields_[j].constant;
            for (int c = 0; c < 3; ++c)
                coeffs_(np + 1 + c, Eigen::Index(j)) = fields_[j].linear[c];
        }

        // wall-flux rows of every basis field at a refined sealed sampling, so
        // a positive wall weight can cancel residual per-field leaks in
        // combination
        if (opts_.wall_weight > 0.0) {
            const BoundarySampleSet fine =
                domain.boundary_samples(std::min(7, opts_.wall_penalty_level));
            for (std::size_t i = 0; i < fine.size(); ++i)
                if (fine.tags[i] == BoundaryRegion::sealed_boundary) {
                    wall_points_.push_back(fine.points[i]);
                    wall_normals_.push_back(fine.normals[i]);
                }
            wall_matrix_.resize(Eigen::Index(wall_points_.size()), Eigen::Index(fields_.size()));
#pragma omp parallel for schedule(static)
            for (Eigen::Index i = 0; i < Eigen::Index(wall_points_.size()); ++i)
                for (Eigen::Index j = 0; j < Eigen::Index(fields_.size()); ++j)
                    wall_matrix_(i, j) =
                        fields_[j].gradient(wall_points_[i]).dot(wall_normals_[i]);
        } else {
            wall_matrix_.resize(0, Eigen::Index(fields_.size()));
        }
    }

    [[nodiscard]] std::size_t size() const { return fields_.size(); }
    [[nodiscard]] const std::vector<PointSourcePotential>& fields() const { return fields_; }
    [[nodiscard]] double max_fit_residual() const { return max_fit_residual_; }
    [[nodiscard]] double max_seal_leak() const { return max_seal_leak_; }
    [[nodiscard]] const NeumannSolver& solver() const { return *solver_; }

    /// Penalize the combination's velocity at free-region points (away from
    /// both the match tube and the wall), so fits do not park large parasitic
    /// fields mid-domain. Weight is relative to the match-block scale.
    void set_interior_regularization(std::vector<Vec3> points, double weight) {
        interior_points_ = std::move(points);
        interior_weight_ = weight;
        const Eigen::Index np = Eigen::Index(solver_->poles().size());
        interior_matrix_.resize(3 * Eigen::Index(interior_points_.size()),
                                Eigen::Index(fields_.size()));
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < Eigen::Index(interior_points_.size()); ++i)
            for (Eigen::Index j = 0; j < Eigen::Index(fields_.size()); ++j) {
                const Vec3 g = fields_[j].gradient(interior_points_[i]);
                for (int c = 0; c < 3; ++c) interior_matrix_(3 * i + c, j) = g[c];
            }
        (void)np;
    }

    struct FitReport {
        double match_residual = 0.0;   // RMS gradient misfit at the points
        double wall_flux_max = 0.0;    // max |u.n| of the fit on the fine sealed sampling
        double control_norm = 0.0;     // max |g_j|
        double condition = 0.0;
        int rank = 0;
    };

    /// Ridge-regularized fit of the basis combination's gradient to target
    /// gradients at the given points. Returns the collapsed single potential.
    [[nodiscard]] std::pair<PointSourcePotential, FitReport> fit(
        const std::vector<Vec3>& points, const std::vector<Vec3>& target_gradients,
        double ridge_rel, double truncation = 1e-13) const {
        if (points.empty() || points.size() != target_gradients.size())
            throw ParameterError("CapControlBasis::fit: bad point/target sizes");
        const Eigen::Index nb = Eigen::Index(fields_.size());
        const Eigen::Index np = Eigen::Index(solver_->poles().size());
        const Eigen::Index m = 3 * Eigen::Index(points.size());

        // kernel gradients at the points; columns follow the coefficient rows
        Eigen::MatrixXd kernel(m, np + 4);
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < Eigen::Index(points.size()); ++i) {
            const Vec3& x = points[i];
            for (Eigen::Index p = 0; p < np; ++p) {
                const Vec3 r = x - solver_->poles()[p];
                const double rn = r.norm();
                const Vec3 k = -r / (four_pi * rn * rn * rn);
                for (int c = 0; c < 3; ++c) kernel(3 * i + c, p) = k[c];
            }
            for (int c = 0; c < 3; ++c) {
                kernel(3 * i + c, np) = 0.0;  // constant has no gradient
                for (int cc = 0; cc < 3; ++cc) kernel(3 * i + c, np + 1 + cc) = (c == cc) ? 1.0 : 0.0;
            }
        }

        const Eigen::Index nw = wall_matrix_.rows();
        const Eigen::Index ni = interior_matrix_.rows();
        Eigen::MatrixXd a(m + nw + ni + nb, nb);
        a.topRows(m).noalias() = kernel * coeffs_;
        const double scale = a.topRows(m).norm() / std::sqrt(double(nb));
        a.middleRows(m, nw) = std::sqrt(opts_.wall_weight) * wall_matrix_;
        if (ni > 0) {
            // balance against the match block: weight is per-point relative
            const double iw = interior_weight_ * std::sqrt(double(m) / double(ni));
            a.middleRows(m + nw, ni) = iw * interior_matrix_;
        }
        a.bottomRows(nb) = (ridge_rel * scale) * Eigen::MatrixXd::Identity(nb, nb);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m + nw + ni + nb);
        for (Eigen::Index i = 0; i < Eigen::Index(points.size()); ++i)
            for (int c = 0; c < 3; ++c) b(3 * i + c) = target_gradients[i][c];

        const LeastSquaresSolution sol = solve_least_squares(std::move(a), b, truncation);

        PointSourcePotential phi;
        phi.poles = solver_->poles();
        const Eigen::VectorXd w = coeffs_ * sol.x;
        phi.weights.assign(w.data(), w.data() + np);
        phi.constant = w(np);
        phi.linear = Vec3(w(np + 1), w(np + 2), w(np + 3));

        FitReport rep;
        double m2 = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            m2 += (phi.gradient(points[i]) - target_gradients[i]).squaredNorm();
        rep.match_residual = std::sqrt(m2 / double(points.size()));
        const Eigen::VectorXd wall = wall_matrix_ * sol.x;
        rep.wall_flux_max = wall.size() ? wall.cwiseAbs().maxCoeff() : 0.0;
        rep.control_norm = sol.x.cwiseAbs().maxCoeff();
        rep.condition = sol.condition;
        rep.rank = sol.rank;
        return {std::move(phi), rep};
    }

  private:
    std::shared_ptr<const NeumannSolver> solver_;
    CapControlOptions opts_;
    std::vector<PointSourcePotential> fields_;
    Eigen::MatrixXd coeffs_;
    std::vector<Vec3> wall_points_;
    std::vector<Vec3> wall_normals_;
    Eigen::MatrixXd wall_matrix_;
    std::vector<Vec3> interior_points_;
    Eigen::MatrixXd interior_matrix_{0, 0};
    double interior_weight_ = 0.0;
    double max_fit_residual_ = 0.0;
    double max_seal_leak_ = 0.0;
};

}  // namespace lagflow
