// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/markers.hpp"

namespace lagflow {

/// Velocity induced by vortex particles through the regularized Biot-Savart
/// kernel (Winckelmans-Leonard high-order algebraic core):
///   u(x) = 1/(4 pi) sum_m alpha_m x r_m * (|r|^2 + 2.5 s^2) / (|r|^2 + s^2)^(5/2)
/// with r_m = x - y_m and alpha_m = omega_m * volume_m. Each summand is exactly
/// divergence-free.
class VortexParticleField {
  public:
    VortexParticleField() = default;

    VortexParticleField(const MarkerCloud& cloud, double core_radius) : core2_(core_radius * core_radius) {
        positions_.reserve(cloud.size());
        alpha_.reserve(cloud.size());
        for (std::size_t m = 0; m < cloud.size(); ++m) {
            positions_.push_back(cloud.position[m]);
            alpha_.push_back(cloud.omega[m] * (cloud.cell_volume * cloud.jacobian[m]));
        }
    }

    [[nodiscard]] bool empty() const { return positions_.empty(); }
    [[nodiscard]] std::size_t size() const { return positions_.size(); }

    Vec3 operator()(double, const Vec3& x) const {
        Vec3 v = Vec3::Zero();
        for (std::size_t m = 0; m < positions_.size(); ++m) {
            const Vec3 r = x - positions_[m];
            const double r2 = r.squaredNorm();
            const double d = r2 + core2_;
            const double g = (r2 + 2.5 * core2_) / (d * d * std::sqrt(d));
            v += alpha_[m].cross(r) * g;
        }
        return v / four_pi;
    }

    [[nodiscard]] Mat3 gradient(double, const Vec3& x) const {
        Mat3 jac = Mat3::Zero();
        for (std::size_t m = 0; m < positions_.size(); ++m) {
            const Vec3 r = x - positions_[m];
            const double r2 = r.squaredNorm();
            const double d = r2 + core2_;
            const double sq = std::sqrt(d);
            const double g = (r2 + 2.5 * core2_) / (d * d * sq);
            // dg/d(r2) = [d^(5/2) - (r2 + 2.5 s^2) * 2.5 d^(3/2)] / d^5
            const double dg = (d - 2.5 * (r2 + 2.5 * core2_)) / (d * d * d * sq);
            const Vec3 axr = alpha_[m].cross(r);
            Mat3 cross_a;
            cross_a << 0, -alpha_[m].z(), alpha_[m].y(),
                       alpha_[m].z(), 0, -alpha_[m].x(),
                      -alpha_[m].y(), alpha_[m].x(), 0;
            jac += g * cross_a + 2.0 * dg * (axr * r.transpose());
        }
        return jac / four_pi;
    }

  private:
    std::vector<Vec3> positions_;
    std::vector<Vec3> alpha_;
    double core2_ = 1.0;
};

/// Default regularization radius: twice the mean marker spacing.
inline double default_core_radius(const MarkerCloud& cloud) {
    return 2.0 * std::cbrt(cloud.cell_volume);
}

}  // namespace lagflow
