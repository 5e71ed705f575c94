// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"

namespace lagflow {

/// Lagrangian vorticity markers: reference position, current position,
/// deformation gradient, Jacobian and the Cauchy-formula vorticity
/// omega = F omega0 / J.
struct MarkerCloud {
    std::vector<Vec3> reference;
    std::vector<Vec3> position;
    std::vector<Vec3> omega0;
    std::vector<Vec3> omega;
    std::vector<Mat3> defgrad;
    std::vector<double> jacobian;
    double cell_volume = 0.0;  // lattice cell volume at seeding
    double time = 0.0;

    [[nodiscard]] std::size_t size() const { return position.size(); }
    [[nodiscard]] bool empty() const { return position.empty(); }

    [[nodiscard]] double max_omega() const {
        double m = 0.0;
        for (const auto& w : omega) m = std::max(m, w.norm());
        return m;
    }
};

/// Uniform lattice restricted to the (numerical) support of curl(u0):
/// omega0 from centered differences of the extended initial field; cells with
/// |omega0| below cut * max are dropped.
template <class F>
MarkerCloud seed_markers(const F& u0, const BoundingBox& box, double spacing,
                         double support_cut = 1e-4) {
    if (spacing <= 0.0) throw ParameterError("seed_markers: spacing must be positive");
    const Vec3 ext = box.extent();
    const int nx = std::max(1, int(std::floor(ext.x() / spacing)) + 1);
    const int ny = std::max(1, int(std::floor(ext.y() / spacing)) + 1);
    const int nz = std::max(1, int(std::floor(ext.z() / spacing)) + 1);

    const double h = 0.25 * spacing;  // difference step for curl
    const auto curl_at = [&](const Vec3& x) {
        const Mat3 j = numeric_gradient(u0, 0.0, x, h);
        return Vec3(j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1));
    };

    std::vector<Vec3> pts, curls;
    double max_curl = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                const Vec3 x = box.lo + spacing * Vec3(i + 0.5, j + 0.5, k + 0.5);
                if (!box.contains(x)) continue;
                const Vec3 w = curl_at(x);
                pts.push_back(x);
                curls.push_back(w);
                max_curl = std::max(max_curl, w.norm());
            }

    MarkerCloud cloud;
    cloud.cell_volume = spacing * spacing * spacing;
    for (std::size_t m = 0; m < pts.size(); ++m) {
        if (curls[m].norm() <= support_cut * max_curl) continue;
        cloud.reference.push_back(pts[m]);
        cloud.position.push_back(pts[m]);
        cloud.omega0.push_back(curls[m]);
        cloud.omega.push_back(curls[m]);
        cloud.defgrad.push_back(Mat3::Identity());
        cloud.jacobian.push_back(1.0);
    }
    return cloud;
}

struct TransportSample {
    double time = 0.0;
    double max_omega = 0.0;
    double max_grad_u = 0.0;  // max over markers of the advecting-field gradient norm
};

using TransportLog = std::vector<TransportSample>;

/// Cauchy-formula vorticity transport along characteristics: jointly integrate
///   d(phi)/dt = u(t, phi),   d(F)/dt = grad(u)(t, phi) F
/// with RK4 and set J = det F, omega = F omega0 / J. This closed form solves
///   d(omega)/dt = (omega . grad)u - (div u) omega
/// since dJ/dt = (div u) J along the flow.
template <class Field>
MarkerCloud transport_vorticity(const Field& u, const MarkerCloud& start, double t0, double t1,
                                int steps, TransportLog* log = nullptr) {
    if (steps < 1) throw ParameterError("transport_vorticity: steps must be >= 1");
    MarkerCloud cloud = start;
    const double h = (t1 - t0) / steps;

    const auto record = [&](double t) {
        if (!log) return;
        TransportSample s;
        s.time = t;
        s.max_omega = cloud.max_omega();
        for (const auto& x : cloud.position)
            s.max_grad_u = std::max(s.max_grad_u, field_gradient(u, t, x).norm());
        log->push_back(s);
    };
    record(t0);

    for (int i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
#pragma omp parallel for schedule(static)
        for (long m = 0; m < long(cloud.size()); ++m) {
            Vec3 x = cloud.position[m];
            Mat3 f = cloud.defgrad[m];
            // markers crossing stiff regions subdivide the step so the local
            // gradient stays resolved; the cap bounds the cost of the few
            // markers that stray into near-wall shear
            double done = 0.0;
            while (done < std::abs(h)) {
                const double tau = t + (h > 0 ? done : -done);
                const Mat3 j1 = field_gradient(u, tau, x);
                double hs = std::min(std::abs(h) - done, 0.35 / std::max(j1.norm(), 1e-12));
                hs = std::max(hs, std::abs(h) / 24.0);
                const double hh = h > 0 ? hs : -hs;
                const Vec3 k1 = u(tau, x);
                const Mat3 g1 = j1 * f;
                const Vec3 x2 = x + 0.5 * hh * k1;
                const Vec3 k2 = u(tau + 0.5 * hh, x2);
                const Mat3 g2 = field_gradient(u, tau + 0.5 * hh, x2) * (f + 0.5 * hh * g1);
                const Vec3 x3 = x + 0.5 * hh * k2;
                const Vec3 k3 = u(tau + 0.5 * hh, x3);
                const Mat3 g3 = field_gradient(u, tau + 0.5 * hh, x3) * (f + 0.5 * hh * g2);
                const Vec3 x4 = x + hh * k3;
                const Vec3 k4 = u(tau + hh, x4);
                const Mat3 g4 = field_gradient(u, tau + hh, x4) * (f + hh * g3);
                x += (hh / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
                f += (hh / 6.0) * (g1 + 2.0 * (g2 + g3) + g4);
                done += hs;
            }
            cloud.position[m] = x;
            cloud.defgrad[m] = f;
        }
        for (std::size_t m = 0; m < cloud.size(); ++m) {
            const double j = cloud.defgrad[m].determinant();
            if (!(j > 0.0) || !finite(cloud.position[m]))
                throw BlowUpError("transport_vorticity: marker Jacobian non-positive", t + h,
                                  long(m));
            cloud.jacobian[m] = j;
            cloud.omega[m] = cloud.defgrad[m] * cloud.omega0[m] / j;
        }
        record(t + h);
    }
    cloud.time = t1;
    return cloud;
}

}  // namespace lagflow
