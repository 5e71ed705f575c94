// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace lagflow {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

/// Deterministic RNG (splitmix64). std::mt19937 + distributions are
/// implementation-defined across standard libraries; summaries must be
/// bit-reproducible from a seed, so we roll our own.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    Vec3 point_in_box(const Vec3& lo, const Vec3& hi) {
        return {uniform(lo.x(), hi.x()), uniform(lo.y(), hi.y()), uniform(lo.z(), hi.z())};
    }

    /// Uniform direction on the unit sphere.
    Vec3 direction() {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * pi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

  private:
    std::uint64_t state_;
};

struct BoundingBox {
    Vec3 lo{Vec3::Constant(std::numeric_limits<double>::max())};
    Vec3 hi{Vec3::Constant(std::numeric_limits<double>::lowest())};

    void absorb(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    [[nodiscard]] Vec3 extent() const { return hi - lo; }
    [[nodiscard]] double diagonal() const { return (hi - lo).norm(); }
    [[nodiscard]] bool contains(const Vec3& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
};

inline bool finite(const Vec3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace lagflow
