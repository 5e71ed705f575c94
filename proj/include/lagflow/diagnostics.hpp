// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lagflow/control.hpp"
#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"
#include "lagflow/markers.hpp"
#include "lagflow/mesh.hpp"

namespace lagflow {

struct EulerResidualReport {
    double residual = 0.0;  // sup over probes of |curl(du/dt + (u.grad)u)|
    double estimate = 0.0;  // Richardson estimate of the discretization error
    double dt = 0.0;
    double h = 0.0;
};

namespace detail {

template <class Field>
Vec3 material_derivative(const Field& u, double t, const Vec3& x, double dt, double h) {
    const Vec3 du_dt = (Vec3(u(t + dt, x)) - Vec3(u(t - dt, x))) / (2.0 * dt);
    const Mat3 grad = numeric_gradient(u, t, x, h);
    return du_dt + grad * Vec3(u(t, x));
}

template <class Field>
double curl_material_residual(const Field& u, double t, const Vec3& x, double dt, double h) {
    Mat3 jac;
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = h;
        jac.col(j) = (material_derivative(u, t, x + e, dt, h) -
                      material_derivative(u, t, x - e, dt, h)) /
                     (2.0 * h);
    }
    return Vec3(jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1)).norm();
}

}  // namespace detail

/// Pointwise Euler consistency: sup over probes of |curl(du/dt + (u.grad)u)|
/// by centered differences, with a Richardson-extrapolated estimate of the
/// discretization error of the instrument itself.
template <class Field>
EulerResidualReport euler_residual(const Field& u, const std::vector<Vec3>& probes,
                                   const std::vector<double>& probe_times, const DomainSpec& domain,
                                   double dt, double h) {
    if (probes.empty() || probe_times.empty())
        throw ParameterError("euler_residual: no probes");
    for (const auto& x : probes)
        if (domain.clearance(x) < 2.0 * h)
            throw ParameterError("euler_residual: probe within 2h of the boundary");

    EulerResidualReport rep;
    rep.dt = dt;
    rep.h = h;
    double coarse = 0.0, fine = 0.0;
    for (double t : probe_times) {
        std::vector<double> rc(probes.size()), rf(probes.size());
#pragma omp parallel for schedule(static)
        for (long i = 0; i < long(probes.size()); ++i) {
            rc[i] = detail::curl_material_residual(u, t, probes[i], dt, h);
            rf[i] = detail::curl_material_residual(u, t, probes[i], 0.5 * dt, 0.5 * h);
        }
        for (std::size_t i = 0; i < probes.size(); ++i) {
            coarse = std::max(coarse, rc[i]);
            fine = std::max(fine, rf[i]);
        }
    }
    rep.residual = fine;
    // second-order instrument: err(h) ~ 4/3 |r(h) - r(h/2)|
    rep.estimate = (4.0 / 3.0) * std::abs(coarse - fine) + 1e-14;
    return rep;
}

/// Bernoulli pressure of the potential phase: p = -d(theta)/dt - |grad theta|^2 / 2.
inline double bernoulli_pressure(const TimePartitionedControl& control, double t, const Vec3& x) {
    const Vec3 g = control(t, x);
    return -control.theta_dt(t, x) - 0.5 * g.squaredNorm();
}

struct GronwallVerdict {
    bool pass = false;
    double margin = 0.0;    // min over time of bound / observed
    double max_omega = 0.0;
    double bound_at_max = 0.0;
};

/// Transport-estimate audit: ||omega(t)|| <= 2 ||omega(0)|| exp(int_0^t ||grad u||)
/// with C = 1 in the sup-norm setting and slack factor 2.
inline GronwallVerdict gronwall_audit(const TransportLog& log) {
    GronwallVerdict v;
    if (log.empty()) return v;
    const double w0 = log.front().max_omega;
    if (w0 == 0.0) {
        v.pass = true;
        v.margin = std::numeric_limits<double>::infinity();
        return v;
    }
    double integral = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (i > 0)
            integral += 0.5 * (log[i].time - log[i - 1].time) *
                        (log[i].max_grad_u + log[i - 1].max_grad_u);
        const double bound = 2.0 * w0 * std::exp(integral);
        if (log[i].max_omega > 0.0) margin = std::min(margin, bound / log[i].max_omega);
        v.max_omega = std::max(v.max_omega, log[i].max_omega);
        v.bound_at_max = bound;
    }
    v.margin = margin;
    v.pass = margin >= 1.0;
    return v;
}

struct ContainmentVerdict {
    bool pass = false;
    double min_clearance = 0.0;
    std::size_t worst_snapshot = 0;
};

/// Minimum clearance of every trajectory vertex from the domain boundary.
inline ContainmentVerdict containment_check(const std::vector<TriangulatedSurface>& trajectory,
                                            const DomainSpec& domain) {
    if (trajectory.empty()) throw ParameterError("containment_check: empty trajectory");
    ContainmentVerdict v;
    v.min_clearance = std::numeric_limits<double>::max();
    for (std::size_t s = 0; s < trajectory.size(); ++s)
        for (const auto& x : trajectory[s].vertices) {
            const double c = domain.clearance(x);
            if (c < v.min_clearance) {
                v.min_clearance = c;
                v.worst_snapshot = s;
            }
        }
    v.pass = v.min_clearance > 0.0;
    return v;
}

}  // namespace lagflow
