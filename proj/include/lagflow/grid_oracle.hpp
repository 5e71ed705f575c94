// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"

namespace lagflow {

/// Vector quantity on a uniform box lattice (cell-centered), with trilinear
/// sampling for comparisons against Lagrangian data.
struct LatticeField {
    Vec3 origin = Vec3::Zero();  // center of cell (0,0,0)
    double h = 1.0;
    int nx = 0, ny = 0, nz = 0;
    std::vector<Vec3> data;

    [[nodiscard]] std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * ny + j) * nz + k;
    }
    [[nodiscard]] const Vec3& at(int i, int j, int k) const { return data[index(i, j, k)]; }
    Vec3& at(int i, int j, int k) { return data[index(i, j, k)]; }

    [[nodiscard]] Vec3 cell_center(int i, int j, int k) const {
        return origin + h * Vec3(i, j, k);
    }

    [[nodiscard]] bool sample_inside(const Vec3& x) const {
        const Vec3 f = (x - origin) / h;
        return f.x() >= 0.0 && f.y() >= 0.0 && f.z() >= 0.0 && f.x() <= nx - 1 &&
               f.y() <= ny - 1 && f.z() <= nz - 1;
    }

    [[nodiscard]] Vec3 sample(const Vec3& x) const {
        Vec3 f = (x - origin) / h;
        f = f.cwiseMax(Vec3::Zero());
        f = f.cwiseMin(Vec3(nx - 1.000001, ny - 1.000001, nz - 1.000001));
        const int i = int(f.x()), j = int(f.y()), k = int(f.z());
        const double a = f.x() - i, b = f.y() - j, c = f.z() - k;
        Vec3 v = Vec3::Zero();
        for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
                for (int dk = 0; dk < 2; ++dk) {
                    const double w = (di ? a : 1 - a) * (dj ? b : 1 - b) * (dk ? c : 1 - c);
                    v += w * at(i + di, j + dj, k + dk);
                }
        return v;
    }
};

struct GridTransportOptions {
    double cfl = 0.4;
};

/// First-order upwind (donor-cell) solution of the vorticity transport system
///   dw/dt + (u . grad) w = (w . grad) u - (div u) w
/// on a fixed lattice. Exists solely as an independent cross-check for the
/// Cauchy-formula marker transport; explicit Euler in time with CFL control.
template <class Field>
LatticeField grid_transport_oracle(const Field& u, const LatticeField& w0, double t0, double t1,
                                   GridTransportOptions opts = {}) {
    if (opts.cfl <= 0.0 || opts.cfl > 0.5)
        throw ParameterError("grid_transport_oracle: CFL must be in (0, 0.5]");
    LatticeField w = w0;
    LatticeField next = w0;

    // max speed over the lattice at t0 sets the step (field assumed smooth in t)
    double umax = 0.0;
    for (int i = 0; i < w.nx; ++i)
        for (int j = 0; j < w.ny; ++j)
            for (int k = 0; k < w.nz; ++k)
                umax = std::max(umax, Vec3(u(t0, w.cell_center(i, j, k))).template lpNorm<Eigen::Infinity>());
    const double dt_cfl = umax > 0.0 ? opts.cfl * w.h / umax : (t1 - t0);
    const int steps = std::max(1, int(std::ceil((t1 - t0) / dt_cfl)));
    const double dt = (t1 - t0) / steps;

    for (int s = 0; s < steps; ++s) {
        const double t = t0 + s * dt;
#pragma omp parallel for schedule(static)
        for (long i = 0; i < w.nx; ++i)
            for (int j = 0; j < w.ny; ++j)
                for (int k = 0; k < w.nz; ++k) {
                    const Vec3 x = w.cell_center(int(i), j, k);
                    const Vec3 vel = u(t, x);
                    const Vec3& c = w.at(int(i), j, k);

                    // donor-cell differences, zero beyond the lattice
                    const auto cell = [&](int a, int b, int d) {
                        if (a < 0 || b < 0 || d < 0 || a >= w.nx || b >= w.ny || d >= w.nz)
                            return Vec3(Vec3::Zero());
                        return Vec3(w.at(a, b, d));
                    };
                    Vec3 adv = Vec3::Zero();
                    adv += vel.x() >= 0.0 ? vel.x() * (c - cell(int(i) - 1, j, k))
                                          : vel.x() * (cell(int(i) + 1, j, k) - c);
                    adv += vel.y() >= 0.0 ? vel.y() * (c - cell(int(i), j - 1, k))
                                          : vel.y() * (cell(int(i), j + 1, k) - c);
                    adv += vel.z() >= 0.0 ? vel.z() * (c - cell(int(i), j, k - 1))
                                          : vel.z() * (cell(int(i), j, k + 1) - c);
                    adv /= w.h;

                    const Mat3 grad = field_gradient(u, t, x);
                    const Vec3 stretch = grad * c - grad.trace() * c;
                    next.at(int(i), j, k) = c + dt * (stretch - adv);
                }
        std::swap(w.data, next.data);
    }
    return w;
}

}  // namespace lagflow
