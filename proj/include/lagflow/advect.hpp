// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"
#include "lagflow/mesh.hpp"

namespace lagflow {

/// One classical RK4 step of dx/dt = u(t,x). Negative h integrates backwards.
template <class Field>
Vec3 rk4_step(const Field& u, double t, const Vec3& x, double h) {
    const Vec3 k1 = u(t, x);
    const Vec3 k2 = u(t + 0.5 * h, x + (0.5 * h) * k1);
    const Vec3 k3 = u(t + 0.5 * h, x + (0.5 * h) * k2);
    const Vec3 k4 = u(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
}

/// Flow map phi^u(t1, t0, x) with `steps` uniform RK4 steps.
template <class Field>
Vec3 advect_point(const Field& u, const Vec3& x0, double t0, double t1, int steps) {
    if (steps < 1) throw ParameterError("advect_point: steps must be >= 1");
    const double h = (t1 - t0) / steps;
    Vec3 x = x0;
    for (int i = 0; i < steps; ++i) {
        x = rk4_step(u, t0 + i * h, x, h);
        if (!finite(x))
            throw BlowUpError("advect_point: non-finite position", t0 + (i + 1) * h);
    }
    return x;
}

/// Advect every vertex; connectivity is untouched. Throws BlowUpError with the
/// offending time if a position becomes non-finite or a triangle degenerates
/// below 1e-12 x (bbox diagonal)^2.
template <class Field>
TriangulatedSurface advect_surface(const TriangulatedSurface& s, const Field& u, double t0,
                                   double t1, int steps) {
    if (steps < 1) throw ParameterError("advect_surface: steps must be >= 1");
    TriangulatedSurface out = s;
    const double h = (t1 - t0) / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
#pragma omp parallel for schedule(static)
        for (long v = 0; v < long(out.vertices.size()); ++v)
            out.vertices[v] = rk4_step(u, t, out.vertices[v], h);
        for (const auto& x : out.vertices)
            if (!finite(x)) throw BlowUpError("advect_surface: non-finite vertex", t + h);
    }
    const double diag = out.bounds().diagonal();
    for (std::size_t f = 0; f < out.face_count(); ++f)
        if (out.face_area(f) <= 1e-12 * diag * diag)
            throw BlowUpError("advect_surface: triangle degenerated during advection", t1, long(f));
    return out;
}

}  // namespace lagflow
