// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "lagflow/bump.hpp"
#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/mesh.hpp"

namespace lagflow {

enum class BoundaryRegion : std::uint8_t { gamma_t, control_patch, sealed_boundary };

/// Quadrature samples on a surface: points, unit outward normals, area weights
/// and a region tag per point.
struct BoundarySampleSet {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<double> weights;
    std::vector<BoundaryRegion> tags;

    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
    [[nodiscard]] std::size_t count(BoundaryRegion r) const {
        std::size_t n = 0;
        for (auto t : tags) n += (t == r);
        return n;
    }

    void validate() const {
        for (double w : weights)
            if (!(w > 0.0)) throw InvariantViolation("BoundarySampleSet: nonpositive weight");
        for (const auto& n : normals)
            if (std::abs(n.norm() - 1.0) > 1e-10)
                throw InvariantViolation("BoundarySampleSet: normal not unit length");
    }
};

/// Centroid samples of a closed mesh, all tagged gamma_t.
inline BoundarySampleSet surface_samples(const TriangulatedSurface& s) {
    BoundarySampleSet set;
    set.points.reserve(s.face_count());
    for (std::size_t f = 0; f < s.face_count(); ++f) {
        const Vec3 an = s.face_area_normal(f);
        const double area = an.norm();
        if (area <= 0.0) throw InvariantViolation("surface_samples: degenerate face");
        set.points.push_back(s.face_centroid(f));
        set.normals.push_back(an / area);
        set.weights.push_back(area);
        set.tags.push_back(BoundaryRegion::gamma_t);
    }
    return set;
}

/// Spherical cap selecting the control patch on the domain boundary:
/// a boundary point with unit radial direction d is in Gamma iff d . axis > cos_threshold.
struct ControlPatch {
    Vec3 axis{0, 0, 1};
    double cos_threshold = 0.8;
};

/// Star-shaped analytic domains: ball, axis-aligned ellipsoid, or a radial
/// spherical-harmonic perturbation of a ball. The boundary radius along a unit
/// direction is closed-form, which makes meshing, normals and radial clearance
/// cheap and exact for the ball.
class DomainSpec {
  public:
    struct Ball {
        double radius = 1.0;
    };
    struct Ellipsoid {
        Vec3 semi_axes{1.0, 1.0, 1.0};
    };
    /// r(d) = radius * (1 + amplitude * Re Y_lm-like polynomial in d).
    struct BumpyBall {
        double radius = 1.0;
        double amplitude = 0.1;
        int degree = 2;
    };

    DomainSpec(Vec3 center, Ball b, ControlPatch patch = {})
        : center_(center), shape_(b), patch_(patch) {
        if (b.radius <= 0.0) throw ParameterError("DomainSpec: ball radius must be positive");
    }
    DomainSpec(Vec3 center, Ellipsoid e, ControlPatch patch = {})
        : center_(center), shape_(e), patch_(patch) {
        if ((e.semi_axes.array() <= 0.0).any())
            throw ParameterError("DomainSpec: ellipsoid semi-axes must be positive");
    }
    DomainSpec(Vec3 center, BumpyBall b, ControlPatch patch = {})
        : center_(center), shape_(b), patch_(patch) {
        if (b.radius <= 0.0 || std::abs(b.amplitude) >= 0.5)
            throw ParameterError("DomainSpec: bumpy ball needs radius > 0, |amplitude| < 0.5");
    }

    [[nodiscard]] const Vec3& center() const { return center_; }
    [[nodiscard]] const ControlPatch& patch() const { return patch_; }
    [[nodiscard]] bool is_ball() const { return std::holds_alternative<Ball>(shape_); }

    /// Boundary radius along unit direction d from the center.
    [[nodiscard]] double boundary_radius(const Vec3& d) const {
        if (const auto* b = std::get_if<Ball>(&shape_)) return b->radius;
        if (const auto* e = std::get_if<Ellipsoid>(&shape_)) {
            const Vec3 q = d.cwiseQuotient(e->semi_axes);
            return 1.0 / q.norm();
        }
        const auto& bb = std::get<BumpyBall>(shape_);
        // zonal harmonic P_l(d.z), enough to exercise non-constant curvature
        const double z = d.z();
        double p = 1.0;
        if (bb.degree == 2) p = 0.5 * (3.0 * z * z - 1.0);
        else if (bb.degree == 3) p = 0.5 * (5.0 * z * z * z - 3.0 * z);
        else if (bb.degree == 4) p = 0.125 * (35.0 * z * z * z * z - 30.0 * z * z + 3.0);
        return bb.radius * (1.0 + bb.amplitude * p);
    }

    [[nodiscard]] double min_radius() const {
        if (const auto* b = std::get_if<Ball>(&shape_)) return b->radius;
        if (const auto* e = std::get_if<Ellipsoid>(&shape_)) return e->semi_axes.minCoeff();
        const auto& bb = std::get<BumpyBall>(shape_);
        return bb.radius * (1.0 - std::abs(bb.amplitude) * 1.5);
    }
    [[nodiscard]] double max_radius() const {
        if (const auto* b = std::get_if<Ball>(&shape_)) return b->radius;
        if (const auto* e = std::get_if<Ellipsoid>(&shape_)) return e->semi_axes.maxCoeff();
        const auto& bb = std::get<BumpyBall>(shape_);
        return bb.radius * (1.0 + std::abs(bb.amplitude) * 1.5);
    }
    [[nodiscard]] double diameter() const { return 2.0 * max_radius(); }

    /// Radial clearance to the boundary: positive inside. Exact distance for
    /// the ball, a first-order radial proxy for the other shapes.
    [[nodiscard]] double clearance(const Vec3& x) const {
        const Vec3 r = x - center_;
        const double rho = r.norm();
        if (rho == 0.0) return min_radius();
        return boundary_radius(r / rho) - rho;
    }

    [[nodiscard]] bool contains(const Vec3& x, double margin = 0.0) const {
        return clearance(x) > margin;
    }

    /// Radial reflection across the boundary (for extending lattice-sampled
    /// fields): x at radius rho maps to radius 2*R(d) - rho along the same ray.
    [[nodiscard]] Vec3 reflect(const Vec3& x) const {
        const Vec3 r = x - center_;
        const double rho = r.norm();
        if (rho == 0.0) return x;
        const Vec3 d = r / rho;
        const double rb = boundary_radius(d);
        return center_ + (2.0 * rb - rho) * d;
    }

    /// Boundary mesh: icosphere mapped radially onto the shape.
    [[nodiscard]] TriangulatedSurface boundary_mesh(int level) const {
        TriangulatedSurface s = mesh_sphere(Vec3::Zero(), 1.0, level);
        for (std::size_t v = 0; v < s.vertices.size(); ++v) {
            const Vec3 d = s.reference_sphere[v];
            s.vertices[v] = center_ + boundary_radius(d) * d;
        }
        return s;
    }

    /// Centroid samples of the boundary mesh, tagged control_patch/sealed_boundary
    /// by the cap predicate. Throws if the control patch catches no samples.
    [[nodiscard]] BoundarySampleSet boundary_samples(int level) const {
        const TriangulatedSurface mesh = boundary_mesh(level);
        BoundarySampleSet set = surface_samples(mesh);
        const Vec3 axis = patch_.axis.normalized();
        std::size_t in_patch = 0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            const Vec3 d = (set.points[i] - center_).normalized();
            const bool gamma = d.dot(axis) > patch_.cos_threshold;
            set.tags[i] = gamma ? BoundaryRegion::control_patch : BoundaryRegion::sealed_boundary;
            in_patch += gamma;
        }
        if (in_patch == 0)
            throw InvariantViolation("DomainSpec: control patch selects no boundary samples");
        return set;
    }

  private:
    Vec3 center_;
    std::variant<Ball, Ellipsoid, BumpyBall> shape_;
    ControlPatch patch_;
};

/// Effective radius of a closed surface, used as its local feature size.
inline double feature_size(const TriangulatedSurface& s) {
    return std::sqrt(s.area() / (4.0 * pi));
}

/// Uniform random point inside the domain (rejection sampling).
inline Vec3 domain_random_point(const DomainSpec& domain, SplitMix64& rng) {
    const double r = domain.max_radius();
    for (;;) {
        const Vec3 x = domain.center() +
                       r * Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        if (domain.contains(x)) return x;
    }
}

}  // namespace lagflow
