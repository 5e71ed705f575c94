// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lagflow/control.hpp"
#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/extension.hpp"
#include "lagflow/field.hpp"
#include "lagflow/markers.hpp"
#include "lagflow/neumann.hpp"
#include "lagflow/reconstruct.hpp"

namespace lagflow {

/// Closed-form node fields at increasing times with linear interpolation
/// between nodes. Carries the slowly varying part of a fixed-point iterate
/// (particle velocity plus its Neumann correction).
class NodeLerpField {
  public:
    NodeLerpField() = default;
    NodeLerpField(std::vector<double> nodes, std::vector<ReconstructedField> fields)
        : nodes_(std::move(nodes)), fields_(std::move(fields)) {
        if (nodes_.size() != fields_.size() || nodes_.empty())
            throw ParameterError("NodeLerpField: node/field size mismatch");
    }

    [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }

    Vec3 operator()(double t, const Vec3& x) const {
        const auto [i, w] = locate(t);
        if (w == 0.0) return fields_[i](t, x);
        return (1.0 - w) * fields_[i](t, x) + w * fields_[i + 1](t, x);
    }

    [[nodiscard]] Mat3 gradient(double t, const Vec3& x) const {
        const auto [i, w] = locate(t);
        if (w == 0.0) return fields_[i].gradient(t, x);
        return (1.0 - w) * fields_[i].gradient(t, x) + w * fields_[i + 1].gradient(t, x);
    }

  private:
    [[nodiscard]] std::pair<std::size_t, double> locate(double t) const {
        if (t <= nodes_.front()) return {0, 0.0};
        if (t >= nodes_.back()) return {nodes_.size() - 1, 0.0};
        std::size_t i = 0;
        while (i + 1 < nodes_.size() && nodes_[i + 1] < t) ++i;
        const double w = (t - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
        return {i, w};
    }

    std::vector<double> nodes_;
    std::vector<ReconstructedField> fields_;
};

/// Everything the operator F needs. The boundary factorization is shared
/// across all iterations.
struct PicardContext {
    DomainSpec domain{Vec3::Zero(), DomainSpec::Ball{1.0}};
    double ball_radius = 2.0;  // R with the domain closure inside B_R
    std::shared_ptr<NeumannSolver> boundary;

    TimePartitionedControl ybar;  // the control: ybar = grad(theta)

    FieldHandle u0;      // initial velocity (evaluated at t = 0)
    bool u0_zero = true;
    TimeCutoff mu{0.1};
    CohomologyBasis basis;
    MarkerCloud cloud0;

    std::vector<double> time_nodes;  // tau_0 = 0 < ... < tau_M = 1
    std::vector<Vec3> lattice;       // residual evaluation points
    int steps_per_node = 3;
    ReconstructOptions reconstruct_opts;
};

struct ApplyFResult {
    FieldHandle field;
    TransportLog transport_log;
    std::vector<double> lambda_final;  // lambda(1), empty for g = 0
    double max_flux_defect = 0.0;      // worst compatibility defect across nodes
};

/// One application of the fixed-point operator:
/// extend -> transport vorticity -> reconstruct with prescribed normal trace ->
/// cohomology update. The ybar part of the trace is handled by the uniqueness
/// identity (the curl-free divergence-free field with trace ybar . n is ybar
/// itself), so only the mu(t) u0 . n and particle parts are solved per node;
/// re-solving ybar's own trace would alias its sub-sample boundary structure.
inline ApplyFResult apply_F(const FieldHandle& u, const PicardContext& ctx) {
    // reflection extension: bounded by the interior sup like the paper's pi;
    // continuing the raw representation would run into its exterior poles
    const auto utilde = extend_field(u, ctx.domain, ctx.ball_radius, 0.0,
                                     ExtendedField<FieldHandle>::Mode::reflect);
    const BoundarySampleSet& bd = ctx.boundary->samples();
    const std::size_t nodes = ctx.time_nodes.size();

    ApplyFResult out;
    std::vector<ReconstructedField> per_node(nodes);
    LambdaTracker lambda_tracker(ctx.basis.empty() ? nullptr : &ctx.basis);
    std::vector<double> u0_pairings(ctx.basis.size(), 0.0);  // int u0 . Q_j = 0 by (CIDiv)

    MarkerCloud cloud = ctx.cloud0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double t = ctx.time_nodes[j];
        if (j > 0 && !cloud.empty())
            cloud = transport_vorticity(utilde, cloud, ctx.time_nodes[j - 1], t,
                                        ctx.steps_per_node, &out.transport_log);
        else if (j == 0 && !cloud.empty())
            transport_vorticity(utilde, cloud, 0.0, 0.0, 1, &out.transport_log);

        std::vector<double> data(bd.size(), 0.0);
        if (!ctx.u0_zero) {
            const double m = ctx.mu(t);
            if (m != 0.0)
                for (std::size_t i = 0; i < bd.size(); ++i)
                    data[i] = m * Vec3(ctx.u0(0.0, bd.points[i])).dot(bd.normals[i]);
        }
        per_node[j] = div_curl_reconstruct(cloud, *ctx.boundary, data, ctx.basis,
                                           ctx.reconstruct_opts, t);
        out.max_flux_defect = std::max(out.max_flux_defect, per_node[j].data_flux_defect);

        if (!ctx.basis.empty()) {
            lambda_tracker.push(t, lambda_tracker.integrand(u, cloud, t));
            out.lambda_final = lambda_tracker.solve(per_node[j], u0_pairings, t);
        }
    }

    auto lerp = std::make_shared<NodeLerpField>(ctx.time_nodes, std::move(per_node));
    auto ybar = std::make_shared<TimePartitionedControl>(ctx.ybar);
    out.field = FieldHandle(
        [lerp, ybar](double t, const Vec3& x) { return Vec3((*ybar)(t, x) + (*lerp)(t, x)); },
        [lerp, ybar](double t, const Vec3& x) {
            return Mat3(ybar->gradient(t, x) + lerp->gradient(t, x));
        });
    return out;
}

/// sup over the lattice and the time nodes of |a - b|.
inline double sup_lattice_distance(const FieldHandle& a, const FieldHandle& b,
                                   const std::vector<Vec3>& lattice,
                                   const std::vector<double>& nodes) {
    double sup = 0.0;
    for (double t : nodes) {
        std::vector<double> local(lattice.size(), 0.0);
#pragma omp parallel for schedule(static)
        for (long i = 0; i < long(lattice.size()); ++i)
            local[i] = (Vec3(a(t, lattice[i])) - Vec3(b(t, lattice[i]))).norm();
        for (double v : local) sup = std::max(sup, v);
    }
    return sup;
}

struct PicardResult {
    FieldHandle u_fixed;
    std::vector<double> residuals;   // ||F(u_k) - u_k|| per iteration
    std::vector<double> ball_norms;  // ||u_k+1 - ybar|| per iteration
    std::vector<double> lambda_norms;
    TransportLog transport_log;      // of the final application
    int iterations = 0;
    bool converged = false;
    double damping = 1.0;
};

/// Damped Picard iteration u_{k+1} = (1-damping) u_k + damping F(u_k) starting
/// from the control itself. Convergence is verified, not assumed: the residual
/// history is returned, non-convergence throws with it attached, and an
/// iterate leaving the ball X_nu around the control aborts with a hint that
/// the initial data wants rescaling.
inline PicardResult picard_solve(const PicardContext& ctx, double nu, double tol, int max_iter,
                                 double damping = 1.0) {
    if (nu <= 0.0 || tol <= 0.0) throw ParameterError("picard_solve: nu and tol must be positive");
    if (damping <= 0.0 || damping > 1.0)
        throw ParameterError("picard_solve: damping must be in (0,1]");

    auto ybar_handle = FieldHandle::wrap(ctx.ybar);
    FieldHandle u = ybar_handle;
    PicardResult result;
    result.damping = damping;

    for (int k = 0; k < max_iter; ++k) {
        ApplyFResult fu = apply_F(u, ctx);
        const double residual = sup_lattice_distance(fu.field, u, ctx.lattice, ctx.time_nodes);
        result.residuals.push_back(residual);
        double lam = 0.0;
        for (double l : fu.lambda_final) lam += l * l;
        result.lambda_norms.push_back(std::sqrt(lam));

        FieldHandle u_next;
        if (damping == 1.0) {
            u_next = fu.field;
        } else {
            auto a = std::make_shared<FieldHandle>(u);
            auto b = std::make_shared<FieldHandle>(fu.field);
            const double d = damping;
            u_next = FieldHandle(
                [a, b, d](double t, const Vec3& x) {
                    return Vec3((1.0 - d) * (*a)(t, x) + d * (*b)(t, x));
                },
                [a, b, d](double t, const Vec3& x) {
                    return Mat3((1.0 - d) * a->gradient(t, x) + d * b->gradient(t, x));
                });
        }

        const double ball = sup_lattice_distance(u_next, ybar_handle, ctx.lattice, ctx.time_nodes);
        result.ball_norms.push_back(ball);
        if (ball > nu)
            throw BallViolationError(
                "picard_solve: iterate left X_nu (initial data too large; rescale rho)", ball, nu);

        u = u_next;
        result.iterations = k + 1;
        if (residual < tol) {
            result.converged = true;
            result.u_fixed = u;
            result.transport_log = std::move(fu.transport_log);
            return result;
        }
        if (k + 1 == max_iter) {
            result.transport_log = std::move(fu.transport_log);
        }
    }
    throw ConvergenceError("picard_solve: no convergence within max_iter", result.residuals);
}

/// Coron time rescaling: u_rho(t,x) = (1/rho) u(t/rho, x) on [0, rho]. The flow
/// maps satisfy phi^{u_rho}(rho, 0, .) = phi^u(1, 0, .) identically.
inline FieldHandle time_rescale(const FieldHandle& u, double rho) {
    if (!(rho > 0.0) || rho > 1.0) throw ParameterError("time_rescale: rho must be in (0,1]");
    if (rho == 1.0) return u;
    auto inner = std::make_shared<FieldHandle>(u);
    return FieldHandle(
        [inner, rho](double t, const Vec3& x) { return Vec3((1.0 / rho) * (*inner)(t / rho, x)); },
        [inner, rho](double t, const Vec3& x) {
            return Mat3((1.0 / rho) * inner->gradient(t / rho, x));
        });
}

}  // namespace lagflow
