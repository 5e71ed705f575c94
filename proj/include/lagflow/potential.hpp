// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/mesh.hpp"

namespace lagflow {

/// Harmonic function represented by point sources outside its region of
/// harmonicity plus an (optional) affine part:
///   phi(x) = sum_p w_p / (4 pi |x - Y_p|) + constant + linear . x
/// Value, gradient and Hessian are exact closed forms.
struct PointSourcePotential {
    std::vector<Vec3> poles;
    std::vector<double> weights;
    double constant = 0.0;
    Vec3 linear = Vec3::Zero();

    double operator()(const Vec3& x) const {
        double v = constant + linear.dot(x);
        for (std::size_t p = 0; p < poles.size(); ++p)
            v += weights[p] / (four_pi * (x - poles[p]).norm());
        return v;
    }

    [[nodiscard]] Vec3 gradient(const Vec3& x) const {
        Vec3 g = linear;
        for (std::size_t p = 0; p < poles.size(); ++p) {
            const Vec3 r = x - poles[p];
            const double rn = r.norm();
            g -= (weights[p] / (four_pi * rn * rn * rn)) * r;
        }
        return g;
    }

    [[nodiscard]] Mat3 hessian(const Vec3& x) const {
        Mat3 h = Mat3::Zero();
        for (std::size_t p = 0; p < poles.size(); ++p) {
            const Vec3 r = x - poles[p];
            const double r2 = r.squaredNorm();
            const double rn = std::sqrt(r2);
            const double c = weights[p] / (four_pi * rn * r2);
            h += c * (3.0 / r2 * (r * r.transpose()) - Mat3::Identity());
        }
        return h;
    }

    [[nodiscard]] double min_pole_distance(const Vec3& x) const {
        double d = std::numeric_limits<double>::max();
        for (const auto& y : poles) d = std::min(d, (x - y).norm());
        return d;
    }

    /// In-place a += s * b. When both potentials share the same pole layout the
    /// weights are merged so evaluation cost does not grow.
    void accumulate(const PointSourcePotential& other, double scale) {
        constant += scale * other.constant;
        linear += scale * other.linear;
        if (poles.size() == other.poles.size()) {
            bool same = true;
            for (std::size_t p = 0; p < poles.size() && same; ++p)
                same = (poles[p] == other.poles[p]);
            if (same) {
                for (std::size_t p = 0; p < weights.size(); ++p)
                    weights[p] += scale * other.weights[p];
                return;
            }
        }
        if (poles.empty() && weights.empty()) {
            poles = other.poles;
            weights.reserve(other.weights.size());
            for (double w : other.weights) weights.push_back(scale * w);
            return;
        }
        poles.insert(poles.end(), other.poles.begin(), other.poles.end());
        for (double w : other.weights) weights.push_back(scale * w);
    }

    void subtract(const PointSourcePotential& other) { accumulate(other, -1.0); }
    void add(const PointSourcePotential& other) { accumulate(other, 1.0); }
};

/// Central-difference Laplacian, for harmonicity probes.
inline double numeric_laplacian(const PointSourcePotential& phi, const Vec3& x, double h) {
    double acc = -6.0 * phi(x);
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = h;
        acc += phi(x + e) + phi(x - e);
    }
    return acc / (h * h);
}

/// What the central-difference Laplacian of an exactly harmonic representation
/// may legitimately return: h^2-truncation through the fourth derivatives of
/// each source term plus cancellation roundoff of the evaluation itself. An
/// actual interior source would exceed this bound as h shrinks.
inline double laplacian_probe_bound(const PointSourcePotential& phi, const Vec3& x, double h) {
    double fourth = 0.0, magnitude = std::abs(phi.constant) + phi.linear.norm() * x.norm();
    for (std::size_t p = 0; p < phi.poles.size(); ++p) {
        const double d = (x - phi.poles[p]).norm();
        const double w = std::abs(phi.weights[p]) / four_pi;
        fourth += w * 24.0 / (d * d * d * d * d);
        magnitude += w / d;
    }
    return h * h * fourth + 64.0 * std::numeric_limits<double>::epsilon() * magnitude / (h * h);
}

/// Velocity sampler u = grad(phi); its spatial gradient is the Hessian.
struct PotentialFlowField {
    PointSourcePotential phi;
    Vec3 operator()(double, const Vec3& x) const { return phi.gradient(x); }
    [[nodiscard]] Mat3 gradient(double, const Vec3& x) const { return phi.hessian(x); }
};

struct PolePlacement {
    std::vector<Vec3> points;
    double min_spacing = 0.0;
    bool collision_warning = false;  // pairwise spacing fell below offset/10
};

enum class PoleSide { inside, outside };

namespace detail {

inline PolePlacement finalize_poles(std::vector<Vec3> pts, double offset) {
    PolePlacement out;
    out.points = std::move(pts);
    out.min_spacing = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < out.points.size(); ++i)
        for (std::size_t j = i + 1; j < out.points.size(); ++j)
            out.min_spacing = std::min(out.min_spacing, (out.points[i] - out.points[j]).norm());
    if (out.points.size() < 2) out.min_spacing = offset;
    out.collision_warning = out.min_spacing < offset / 10.0;
    return out;
}

}  // namespace detail

/// Quasi-uniform unit directions (Fibonacci sphere).
inline std::vector<Vec3> fibonacci_directions(int count) {
    std::vector<Vec3> dirs;
    dirs.reserve(count);
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        dirs.emplace_back(r * std::cos(a), r * std::sin(a), z);
    }
    return dirs;
}

/// Quasi-uniform pole set at signed normal offset from a closed mesh: faces
/// are selected by matching Fibonacci directions about the centroid, poles sit
/// at centroid(face) +/- offset * normal(face).
inline PolePlacement place_poles(const TriangulatedSurface& s, PoleSide side, double offset,
                                 int count) {
    if (offset <= 0.0) throw ParameterError("place_poles: offset must be positive");
    if (count < 4) throw ParameterError("place_poles: count must be >= 4");
    if (std::size_t(count) > s.face_count())
        throw ParameterError("place_poles: count exceeds candidate face count");
    const double sign = (side == PoleSide::outside) ? 1.0 : -1.0;

    Vec3 center = Vec3::Zero();
    for (const auto& v : s.vertices) center += v;
    center /= double(s.vertex_count());
    std::vector<Vec3> face_dirs(s.face_count());
    for (std::size_t f = 0; f < s.face_count(); ++f)
        face_dirs[f] = (s.face_centroid(f) - center).normalized();

    std::vector<bool> used(s.face_count(), false);
    std::vector<Vec3> pts;
    pts.reserve(count);
    for (const Vec3& d : fibonacci_directions(count)) {
        std::size_t best = 0;
        double best_dot = -2.0;
        for (std::size_t f = 0; f < s.face_count(); ++f) {
            if (used[f]) continue;
            const double dot = d.dot(face_dirs[f]);
            if (dot > best_dot) {
                best_dot = dot;
                best = f;
            }
        }
        used[best] = true;
        const Vec3 an = s.face_area_normal(best);
        pts.push_back(s.face_centroid(best) + sign * offset * an.normalized());
    }
    return detail::finalize_poles(std::move(pts), offset);
}

/// Pole set offset from the domain boundary (outside the closure for
/// side = outside). The mesh level is chosen so enough faces exist.
inline PolePlacement place_poles(const DomainSpec& domain, PoleSide side, double offset,
                                 int count) {
    int level = 0;
    while ((20 << (2 * level)) < count && level < 7) ++level;
    const TriangulatedSurface mesh = domain.boundary_mesh(level);
    PolePlacement out = place_poles(mesh, side, offset, count);
    if (side == PoleSide::outside)
        for (const auto& p : out.points)
            if (domain.clearance(p) > -offset / 2.0)
                throw GeometryError("place_poles: exterior pole too close to domain");
    return out;
}

}  // namespace lagflow
