// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/mesh.hpp"

namespace lagflow {

/// Closest point on triangle (a,b,c) to p. Ericson, Real-Time Collision Detection 5.1.5.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    const double denom = 1.0 / (va + vb + vc);
    return a + (vb * denom) * ab + (vc * denom) * ac;
}

namespace detail {

/// Brute-force closest point on a mesh with centroid-radius pruning.
class ClosestPointQuery {
  public:
    explicit ClosestPointQuery(const TriangulatedSurface& s) : mesh_(s) {
        centroids_.reserve(s.face_count());
        radii_.reserve(s.face_count());
        for (std::size_t f = 0; f < s.face_count(); ++f) {
            const auto& t = s.faces[f];
            const Vec3 c = s.face_centroid(f);
            double r = 0.0;
            for (int k = 0; k < 3; ++k) r = std::max(r, (s.vertices[t[k]] - c).norm());
            centroids_.push_back(c);
            radii_.push_back(r);
        }
    }

    struct Result {
        Vec3 point;
        std::size_t face;
        double distance;
    };

    [[nodiscard]] Result operator()(const Vec3& p) const {
        // Seed the bound with the nearest centroid.
        double best = std::numeric_limits<double>::max();
        std::size_t seed = 0;
        for (std::size_t f = 0; f < centroids_.size(); ++f) {
            const double d = (centroids_[f] - p).norm();
            if (d < best) {
                best = d;
                seed = f;
            }
        }
        Result res;
        res.face = seed;
        res.point = closest_of_face(p, seed);
        res.distance = (res.point - p).norm();
        for (std::size_t f = 0; f < centroids_.size(); ++f) {
            if ((centroids_[f] - p).norm() - radii_[f] >= res.distance) continue;
            const Vec3 q = closest_of_face(p, f);
            const double d = (q - p).norm();
            if (d < res.distance) {
                res.distance = d;
                res.point = q;
                res.face = f;
            }
        }
        return res;
    }

  private:
    [[nodiscard]] Vec3 closest_of_face(const Vec3& p, std::size_t f) const {
        const auto& t = mesh_.faces[f];
        return closest_point_on_triangle(p, mesh_.vertices[t[0]], mesh_.vertices[t[1]],
                                         mesh_.vertices[t[2]]);
    }

    const TriangulatedSurface& mesh_;
    std::vector<Vec3> centroids_;
    std::vector<double> radii_;
};

}  // namespace detail

struct SurfaceDistance {
    double hausdorff = 0.0;         // max over both directions of vertex-to-surface distance
    double mean = 0.0;              // average of the two directed mean distances
    double normal_deviation = 0.0;  // radians, max angle between matched normals
};

/// Parameterization-free comparison of two closed meshes: symmetric
/// point-to-triangle Hausdorff/mean distance plus the max angle between the
/// normal at each vertex and the (barycentric) normal at its closest point.
inline SurfaceDistance surface_distance(const TriangulatedSurface& a,
                                        const TriangulatedSurface& b) {
    const auto normals_a = a.vertex_normals();
    const auto normals_b = b.vertex_normals();

    const auto directed = [](const TriangulatedSurface& from, const std::vector<Vec3>& nfrom,
                             const TriangulatedSurface& to, const std::vector<Vec3>& nto) {
        detail::ClosestPointQuery query(to);
        double dmax = 0.0, dsum = 0.0, angle_max = 0.0;
        std::vector<double> dist(from.vertices.size()), angle(from.vertices.size());
#pragma omp parallel for schedule(static)
        for (long v = 0; v < long(from.vertices.size()); ++v) {
            const auto hit = query(from.vertices[v]);
            dist[v] = hit.distance;
            // Interpolate the target's vertex normals over the closest face.
            const auto& tri = to.faces[hit.face];
            const Vec3& p0 = to.vertices[tri[0]];
            const Vec3& p1 = to.vertices[tri[1]];
            const Vec3& p2 = to.vertices[tri[2]];
            const Vec3 an = (p1 - p0).cross(p2 - p0);
            const double a2 = an.squaredNorm();
            double w0 = 1.0 / 3, w1 = 1.0 / 3, w2 = 1.0 / 3;
            if (a2 > 0.0) {
                const Vec3 q = hit.point;
                w0 = (p1 - q).cross(p2 - q).dot(an) / a2;
                w1 = (p2 - q).cross(p0 - q).dot(an) / a2;
                w2 = 1.0 - w0 - w1;
            }
            Vec3 n = w0 * nto[tri[0]] + w1 * nto[tri[1]] + w2 * nto[tri[2]];
            const double len = n.norm();
            if (len > 0.0) n /= len;
            angle[v] = std::acos(std::clamp(nfrom[v].dot(n), -1.0, 1.0));
        }
        for (std::size_t v = 0; v < from.vertices.size(); ++v) {
            dmax = std::max(dmax, dist[v]);
            dsum += dist[v];
            angle_max = std::max(angle_max, angle[v]);
        }
        return std::array<double, 3>{dmax, dsum / double(from.vertices.size()), angle_max};
    };

    const auto ab = directed(a, normals_a, b, normals_b);
    const auto ba = directed(b, normals_b, a, normals_a);
    SurfaceDistance out;
    out.hausdorff = std::max(ab[0], ba[0]);
    out.mean = 0.5 * (ab[1] + ba[1]);
    out.normal_deviation = std::max(ab[2], ba[2]);
    return out;
}

}  // namespace lagflow
