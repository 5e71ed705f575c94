// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lagflow/bump.hpp"
#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/mesh.hpp"

namespace lagflow {

namespace detail {

/// Cumulative integral of the normalized bump speed profile, S(0)=0, S(1)=1.
inline double speed_cdf(double u) {
    static const std::vector<double> table = [] {
        const int n = 4096;
        std::vector<double> acc(n + 1, 0.0);
        const SpeedProfile s;
        const double h = 1.0 / n;
        for (int i = 0; i < n; ++i) {
            const double a = i * h, b = (i + 1) * h;
            acc[i + 1] = acc[i] + h / 6.0 * (s(a) + 4.0 * s(0.5 * (a + b)) + s(b));
        }
        for (auto& v : acc) v /= acc[n];
        return acc;
    }();
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double f = u * 4096.0;
    const int i = std::min(4095, int(f));
    return table[i] + (f - i) * (table[i + 1] - table[i]);
}

/// Distance from x to segment [a,b].
inline double segment_distance(const Vec3& x, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (x - (a + s * ab)).norm();
}

}  // namespace detail

/// Divergence-free field X = curl(chi * A). A is affine-in-x per time segment
/// (uniform translation plus a traceless diagonal stretch about the moving
/// center), chi a smooth capsule cutoff equal to 1 on the fattened swept tube
/// and 0 before the domain boundary. Inside the tube the flow is the exact
/// closed-form affine motion; div X = 0 identically as a curl.
class DivFreeIsotopyField {
  public:
    struct Segment {
        double t0 = 0.0, t1 = 1.0;
        Vec3 displacement = Vec3::Zero();
        Vec3 log_scaling = Vec3::Zero();  // (ln l1, ln l2, ln l3), sums to 0
        Vec3 center_start = Vec3::Zero(); // centroid path at t0
    };
    struct Capsule {
        Vec3 a, b;
        double r_inner = 0.0;  // chi = 1 within this capsule radius
        double r_outer = 0.0;  // chi = 0 outside this one
    };

    DivFreeIsotopyField() = default;
    DivFreeIsotopyField(std::vector<Segment> segments, std::vector<Capsule> capsules)
        : segments_(std::move(segments)), capsules_(std::move(capsules)) {}

    [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }
    [[nodiscard]] const std::vector<Capsule>& capsules() const { return capsules_; }

    /// Tube cutoff chi(x): smooth union of per-capsule cutoffs.
    [[nodiscard]] double cutoff(const Vec3& x) const {
        double prod = 1.0;
        for (const auto& c : capsules_) prod *= 1.0 - capsule_cutoff(c, x);
        return 1.0 - prod;
    }

    Vec3 operator()(double t, const Vec3& x) const {
        const Segment* seg = active_segment(t);
        if (!seg) return Vec3::Zero();
        const double u = (t - seg->t0) / (seg->t1 - seg->t0);
        const double speed = SpeedProfile{}(u) / (seg->t1 - seg->t0);
        if (speed == 0.0) return Vec3::Zero();

        // curl A = speed * (displacement + G (x - xc))
        const Vec3 xc = center_at(*seg, u);
        const Vec3 curl_a =
            speed * (seg->displacement + seg->log_scaling.cwiseProduct(x - xc));

        const double chi = cutoff(x);
        Vec3 grad_chi = Vec3::Zero();
        if (chi > 0.0 && chi < 1.0) grad_chi = cutoff_gradient(x);
        if (grad_chi.isZero()) return chi * curl_a;
        return grad_chi.cross(vector_potential(*seg, u, speed, x, xc)) + chi * curl_a;
    }

    /// Exact image of a surface under the full [0,1] flow (valid because the
    /// tube interior moves by the closed-form affine motion).
    [[nodiscard]] TriangulatedSurface endpoint_image(const TriangulatedSurface& s) const {
        TriangulatedSurface out = s;
        for (const auto& seg : segments_) {
            const Vec3 scale = seg.log_scaling.array().exp();
            const Vec3 c0 = center_at(seg, 0.0);
            const Vec3 c1 = center_at(seg, 1.0);
            for (auto& v : out.vertices) v = c1 + scale.cwiseProduct(v - c0);
        }
        return out;
    }

    /// Minimum clearance of the chi-support from the domain boundary; throws a
    /// GeometryError naming the violating time if the tube exits the domain.
    double validate_inside(const DomainSpec& domain, double margin = 0.0) const {
        double min_clear = std::numeric_limits<double>::max();
        for (std::size_t k = 0; k < capsules_.size(); ++k) {
            const auto& c = capsules_[k];
            for (int i = 0; i <= 32; ++i) {
                const double s = i / 32.0;
                const Vec3 p = c.a + s * (c.b - c.a);
                const double clear = domain.clearance(p) - c.r_outer;
                if (clear <= margin) {
                    const double t = segments_.empty()
                                         ? s
                                         : segments_[std::min(k, segments_.size() - 1)].t0 +
                                               s * (segments_[std::min(k, segments_.size() - 1)].t1 -
                                                    segments_[std::min(k, segments_.size() - 1)].t0);
                    throw GeometryError("isotopy tube leaves the domain near t = " +
                                            std::to_string(t),
                                        t);
                }
                min_clear = std::min(min_clear, clear);
            }
        }
        return min_clear;
    }

  private:
    [[nodiscard]] const Segment* active_segment(double t) const {
        for (const auto& s : segments_)
            if (t > s.t0 && t < s.t1) return &s;
        return nullptr;
    }

    static Vec3 center_at(const Segment& seg, double u) {
        return seg.center_start + detail::speed_cdf(u) * seg.displacement;
    }

    /// A(t,x) = speed * (0.5 d x x + Q(x - xc)) with Q the quadratic potential
    /// of the traceless diagonal stretch.
    static Vec3 vector_potential(const Segment& seg, double /*u*/, double speed, const Vec3& x,
                                 const Vec3& xc) {
        const Vec3 d = seg.displacement;
        Vec3 a = 0.5 * d.cross(x);
        const Vec3& g = seg.log_scaling;
        const double alpha = (g.y() - g.z()) / 3.0;
        const double beta = (g.z() - g.x()) / 3.0;
        const double gamma = (g.x() - g.y()) / 3.0;
        const Vec3 xi = x - xc;
        a += Vec3(alpha * xi.y() * xi.z(), beta * xi.z() * xi.x(), gamma * xi.x() * xi.y());
        return speed * a;
    }

    static double capsule_cutoff(const Capsule& c, const Vec3& x) {
        const double d = detail::segment_distance(x, c.a, c.b);
        return smooth_step_down((d - c.r_inner) / (c.r_outer - c.r_inner));
    }

    [[nodiscard]] Vec3 cutoff_gradient(const Vec3& x) const {
        // d/dx [1 - prod(1 - chi_k)] with chi_k = T((d_k - r_in)/(r_out - r_in))
        std::vector<double> vals(capsules_.size());
        std::vector<Vec3> grads(capsules_.size());
        for (std::size_t k = 0; k < capsules_.size(); ++k) {
            const auto& c = capsules_[k];
            const Vec3 ab = c.b - c.a;
            const double len2 = ab.squaredNorm();
            const double s = len2 > 0.0 ? std::clamp((x - c.a).dot(ab) / len2, 0.0, 1.0) : 0.0;
            const Vec3 diff = x - (c.a + s * ab);
            const double d = diff.norm();
            vals[k] = smooth_step_down((d - c.r_inner) / (c.r_outer - c.r_inner));
            if (d > 0.0)
                grads[k] = smooth_step_down_derivative((d - c.r_inner) / (c.r_outer - c.r_inner)) /
                           (c.r_outer - c.r_inner) * (diff / d);
            else
                grads[k] = Vec3::Zero();
        }
        Vec3 g = Vec3::Zero();
        for (std::size_t k = 0; k < capsules_.size(); ++k) {
            double prod = 1.0;
            for (std::size_t j = 0; j < capsules_.size(); ++j)
                if (j != k) prod *= 1.0 - vals[j];
            g += prod * grads[k];
        }
        return g;
    }

    std::vector<Segment> segments_;
    std::vector<Capsule> capsules_;
};

/// Translation isotopy: carries gamma0 rigidly along `displacement` over [0,1]
/// with a smooth speed ramp. The capsule cutoff equals 1 on the swept surface
/// fattened by tube_radius and vanishes with clearance from the boundary.
inline DivFreeIsotopyField build_translation_isotopy(const TriangulatedSurface& gamma0,
                                                     const Vec3& displacement,
                                                     const DomainSpec& domain,
                                                     double tube_radius) {
    if (tube_radius <= 0.0) throw ParameterError("build_translation_isotopy: tube_radius <= 0");
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : gamma0.vertices) centroid += v;
    centroid /= double(gamma0.vertex_count());
    double surf_radius = 0.0;
    for (const auto& v : gamma0.vertices) surf_radius = std::max(surf_radius, (v - centroid).norm());

    DivFreeIsotopyField::Segment seg;
    seg.t0 = 0.0;
    seg.t1 = 1.0;
    seg.displacement = displacement;
    seg.center_start = centroid;

    DivFreeIsotopyField::Capsule cap;
    cap.a = centroid;
    cap.b = centroid + displacement;
    cap.r_inner = surf_radius + tube_radius;

    // Transition width: half of what remains between the tube and the boundary.
    double path_clear = std::numeric_limits<double>::max();
    for (int i = 0; i <= 32; ++i)
        path_clear = std::min(path_clear, domain.clearance(cap.a + (i / 32.0) * displacement));
    const double room = path_clear - cap.r_inner;
    if (room <= 0.0)
        throw GeometryError("build_translation_isotopy: fattened tube exits the domain", 0.0);
    cap.r_outer = cap.r_inner + 0.5 * room;

    DivFreeIsotopyField field({seg}, {cap});
    field.validate_inside(domain);
    return field;
}

struct IsotopyWaypoint {
    double time = 1.0;         // segment end time in (0,1]
    Vec3 displacement = Vec3::Zero();
    Vec3 scaling = Vec3::Ones();  // per-axis stretch, product must be 1
};

/// Composite volume-preserving motion: per waypoint a rigid displacement
/// combined with a traceless diagonal stretch about the moving centroid.
inline DivFreeIsotopyField build_composite_isotopy(const TriangulatedSurface& gamma0,
                                                   const std::vector<IsotopyWaypoint>& waypoints,
                                                   const DomainSpec& domain, double tube_radius) {
    if (waypoints.empty()) throw ParameterError("build_composite_isotopy: no waypoints");
    if (tube_radius <= 0.0) throw ParameterError("build_composite_isotopy: tube_radius <= 0");
    for (const auto& w : waypoints) {
        const double vol_factor = w.scaling.prod();
        if (std::abs(vol_factor - 1.0) > 1e-9)
            throw CompatibilityError(
                "build_composite_isotopy: scaling does not preserve volume (surfaces must "
                "enclose the same volume)");
        if ((w.scaling.array() <= 0.0).any())
            throw ParameterError("build_composite_isotopy: scaling factors must be positive");
    }

    Vec3 centroid = Vec3::Zero();
    for (const auto& v : gamma0.vertices) centroid += v;
    centroid /= double(gamma0.vertex_count());
    double surf_radius = 0.0;
    for (const auto& v : gamma0.vertices) surf_radius = std::max(surf_radius, (v - centroid).norm());

    std::vector<DivFreeIsotopyField::Segment> segments;
    std::vector<DivFreeIsotopyField::Capsule> capsules;
    double t_prev = 0.0;
    Vec3 c_prev = centroid;
    double r_run = surf_radius;
    for (const auto& w : waypoints) {
        if (w.time <= t_prev || w.time > 1.0)
            throw ParameterError("build_composite_isotopy: waypoint times must increase in (0,1]");
        DivFreeIsotopyField::Segment seg;
        seg.t0 = t_prev;
        seg.t1 = w.time;
        seg.displacement = w.displacement;
        seg.log_scaling = w.scaling.array().log();
        seg.center_start = c_prev;
        segments.push_back(seg);

        const double r_end = r_run * w.scaling.maxCoeff();
        DivFreeIsotopyField::Capsule cap;
        cap.a = c_prev;
        cap.b = c_prev + w.displacement;
        cap.r_inner = std::max(r_run, r_end) + tube_radius;

        double path_clear = std::numeric_limits<double>::max();
        for (int i = 0; i <= 32; ++i)
            path_clear = std::min(path_clear, domain.clearance(cap.a + (i / 32.0) * w.displacement));
        const double room = path_clear - cap.r_inner;
        if (room <= 0.0)
            throw GeometryError("build_composite_isotopy: fattened tube exits the domain near t = " +
                                    std::to_string(t_prev),
                                t_prev);
        cap.r_outer = cap.r_inner + 0.5 * room;
        capsules.push_back(cap);

        t_prev = w.time;
        c_prev += w.displacement;
        r_run = r_end;
    }

    DivFreeIsotopyField field(std::move(segments), std::move(capsules));
    field.validate_inside(domain);
    return field;
}

}  // namespace lagflow
