// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"

namespace lagflow {

/// Closed oriented triangle mesh standing in for an embedded 2-sphere.
/// Faces are index triples with consistent outward orientation.
struct TriangulatedSurface {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    /// Reference coordinates on the unit sphere, one per vertex. Filled by the
    /// icosphere generator; optional for imported meshes.
    std::vector<Vec3> reference_sphere;

    [[nodiscard]] std::size_t vertex_count() const { return vertices.size(); }
    [[nodiscard]] std::size_t face_count() const { return faces.size(); }

    [[nodiscard]] Vec3 face_centroid(std::size_t f) const {
        const auto& t = faces[f];
        return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
    }

    /// Area-weighted outward normal (cross product / 2), not normalized.
    [[nodiscard]] Vec3 face_area_normal(std::size_t f) const {
        const auto& t = faces[f];
        return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    }

    [[nodiscard]] double face_area(std::size_t f) const { return face_area_normal(f).norm(); }

    [[nodiscard]] double area() const {
        double a = 0.0;
        for (std::size_t f = 0; f < faces.size(); ++f) a += face_area(f);
        return a;
    }

    [[nodiscard]] BoundingBox bounds() const {
        BoundingBox b;
        for (const auto& v : vertices) b.absorb(v);
        return b;
    }

    /// Angle-weighted vertex normals (unit length).
    [[nodiscard]] std::vector<Vec3> vertex_normals() const;

    void flip_orientation() {
        for (auto& t : faces) std::swap(t[1], t[2]);
    }
};

/// Divergence-theorem volume: (1/3) sum over faces of centroid . area-normal.
/// Positive for consistently outward-oriented closed meshes.
inline double enclosed_volume(const TriangulatedSurface& s) {
    double vol = 0.0;
    for (std::size_t f = 0; f < s.faces.size(); ++f)
        vol += s.face_centroid(f).dot(s.face_area_normal(f));
    return vol / 3.0;
}

inline std::vector<Vec3> TriangulatedSurface::vertex_normals() const {
    std::vector<Vec3> normals(vertices.size(), Vec3::Zero());
    for (const auto& t : faces) {
        for (int k = 0; k < 3; ++k) {
            const Vec3& a = vertices[t[k]];
            const Vec3& b = vertices[t[(k + 1) % 3]];
            const Vec3& c = vertices[t[(k + 2) % 3]];
            const Vec3 e1 = b - a, e2 = c - a;
            const double denom = e1.norm() * e2.norm();
            if (denom <= 0.0) continue;
            const double angle = std::acos(std::clamp(e1.dot(e2) / denom, -1.0, 1.0));
            normals[t[k]] += angle * e1.cross(e2).normalized();
        }
    }
    for (auto& n : normals) {
        const double len = n.norm();
        if (len > 0.0) n /= len;
    }
    return normals;
}

/// Checks the closed-manifold / genus-0 / nondegeneracy / orientation
/// invariants. Throws InvariantViolation on the first failure.
inline void validate_surface(const TriangulatedSurface& s) {
    if (s.vertices.size() < 4 || s.faces.size() < 4)
        throw InvariantViolation("surface has too few vertices or faces");

    const std::size_t nv = s.vertices.size();
    std::map<std::pair<int, int>, int> edge_use;  // directed edges
    for (const auto& t : s.faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (a < 0 || b < 0 || a >= int(nv) || b >= int(nv))
                throw InvariantViolation("face index out of range");
            if (a == b) throw InvariantViolation("degenerate face (repeated vertex)");
            if (!edge_use.emplace(std::make_pair(a, b), 1).second)
                throw InvariantViolation("directed edge used twice: orientation inconsistent");
        }
    }
    // Closed manifold: every directed edge must have its opposite.
    std::size_t undirected = 0;
    for (const auto& [e, cnt] : edge_use) {
        (void)cnt;
        if (e.first < e.second) {
            if (!edge_use.count({e.second, e.first}))
                throw InvariantViolation("boundary edge found: mesh is not closed");
            ++undirected;
        }
    }
    const long euler = long(nv) - long(undirected) + long(s.faces.size());
    if (euler != 2) throw InvariantViolation("Euler characteristic != 2: surface is not genus 0");

    const double diag2 = s.bounds().diagonal() * s.bounds().diagonal();
    for (std::size_t f = 0; f < s.faces.size(); ++f)
        if (s.face_area(f) <= 1e-12 * diag2)
            throw InvariantViolation("near-degenerate face area");

    if (enclosed_volume(s) <= 0.0)
        throw InvariantViolation("negative enclosed volume: orientation is inward");
}

namespace detail {

inline int midpoint_index(int a, int b, std::map<std::pair<int, int>, int>& cache,
                          std::vector<Vec3>& verts) {
    const auto key = std::minmax(a, b);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const Vec3 m = (verts[a] + verts[b]).normalized();
    verts.push_back(m);
    const int idx = int(verts.size()) - 1;
    cache.emplace(key, idx);
    return idx;
}

}  // namespace detail

/// Icosphere: subdivided icosahedron projected to the sphere.
/// Vertex count is 10*4^level + 2, face count 20*4^level.
inline TriangulatedSurface mesh_sphere(const Vec3& center, double radius, int level) {
    if (radius <= 0.0) throw ParameterError("mesh_sphere: radius must be positive");
    if (level < 0 || level > 7) throw ParameterError("mesh_sphere: subdivision level out of [0,7]");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> cache;
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& t : faces) {
            const int ab = detail::midpoint_index(t[0], t[1], cache, verts);
            const int bc = detail::midpoint_index(t[1], t[2], cache, verts);
            const int ca = detail::midpoint_index(t[2], t[0], cache, verts);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriangulatedSurface s;
    s.reference_sphere = verts;
    s.vertices.reserve(verts.size());
    for (const auto& v : verts) s.vertices.push_back(center + radius * v);
    s.faces = std::move(faces);
    return s;
}

/// Midpoint quadrature of field . n over the surface at time t.
template <class Field>
double surface_flux(const TriangulatedSurface& s, const Field& field, double t) {
    double flux = 0.0;
    for (std::size_t f = 0; f < s.faces.size(); ++f)
        flux += Vec3(field(t, s.face_centroid(f))).dot(s.face_area_normal(f));
    return flux;
}

}  // namespace lagflow
