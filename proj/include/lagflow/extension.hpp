// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <utility>

#include "lagflow/bump.hpp"
#include "lagflow/core.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"

namespace lagflow {

/// Extension of an interior field to the ball B_R: u_tilde = zeta * (continuation
/// of u), zeta a smooth cutoff equal to 1 on the domain closure and 0 before
/// |x| = R - margin. Closed-form fields (potentials, particle sums, curls) are
/// globally defined and continue by evaluation; lattice-sampled fields continue
/// by radial reflection across the boundary. Linear in u either way.
template <class F>
class ExtendedField {
  public:
    enum class Mode { closed_form, reflect };

    ExtendedField(F inner, DomainSpec domain, double radius, double margin = 0.0,
                  Mode mode = Mode::closed_form)
        : inner_(std::move(inner)),
          domain_(std::move(domain)),
          radius_(radius),
          margin_(margin > 0.0 ? margin : 0.05 * radius),
          mode_(mode) {
        if (domain_.max_radius() + (domain_.center() - Vec3::Zero()).norm() >= radius_ - margin_)
            throw GeometryError("extend_field: ball radius too small for the domain");
    }

    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] const DomainSpec& domain() const { return domain_; }

    /// Cutoff: 1 on the domain closure, 0 for |x| >= R - margin.
    [[nodiscard]] double zeta(const Vec3& x) const {
        const Vec3 r = x - domain_.center();
        const double rho = r.norm();
        if (rho == 0.0) return 1.0;
        const double rb = domain_.boundary_radius(r / rho);
        const double stop = radius_ - margin_ - (domain_.center()).norm();
        return smooth_step_down((rho - rb) / (stop - rb));
    }

    Vec3 operator()(double t, const Vec3& x) const {
        const double z = zeta(x);
        if (z == 0.0) return Vec3::Zero();
        return z * continued(t, x);
    }

    [[nodiscard]] Mat3 gradient(double t, const Vec3& x) const {
        const double z = zeta(x);
        if (z == 0.0) return Mat3::Zero();
        const Vec3 u = continued(t, x);
        Mat3 jac = z * continued_gradient(t, x);
        // rank-one cutoff term  u (grad zeta)^T
        const Vec3 r = x - domain_.center();
        const double rho = r.norm();
        if (rho > 0.0) {
            const double rb = domain_.boundary_radius(r / rho);
            const double stop = radius_ - margin_ - (domain_.center()).norm();
            const double ds = smooth_step_down_derivative((rho - rb) / (stop - rb));
            if (ds != 0.0) {
                // radial derivative only; exact for the ball, leading order otherwise
                const Vec3 grad_zeta = (ds / (stop - rb)) * (r / rho);
                jac += u * grad_zeta.transpose();
            }
        }
        return jac;
    }

  private:
    [[nodiscard]] Vec3 continued(double t, const Vec3& x) const {
        if (mode_ == Mode::closed_form || domain_.contains(x)) return inner_(t, x);
        return inner_(t, domain_.reflect(x));
    }
    [[nodiscard]] Mat3 continued_gradient(double t, const Vec3& x) const {
        if (mode_ == Mode::closed_form || domain_.contains(x))
            return field_gradient(inner_, t, x);
        if (domain_.is_ball()) {
            // exact chain rule through the radial reflection of a ball
            const Vec3 xi = x - domain_.center();
            const double rho = xi.norm();
            const Vec3 d = xi / rho;
            const double rb = domain_.boundary_radius(d);
            const Mat3 jr = ((2.0 * rb - rho) / rho) * (Mat3::Identity() - d * d.transpose()) -
                            d * d.transpose();
            return field_gradient(inner_, t, domain_.reflect(x)) * jr;
        }
        return numeric_gradient([this, t](double, const Vec3& p) { return continued(t, p); }, t, x,
                                1e-5);
    }

    F inner_;
    DomainSpec domain_;
    double radius_;
    double margin_;
    Mode mode_;
};

template <class F>
ExtendedField<F> extend_field(F inner, const DomainSpec& domain, double radius,
                              double margin = 0.0,
                              typename ExtendedField<F>::Mode mode =
                                  ExtendedField<F>::Mode::closed_form) {
    return ExtendedField<F>(std::move(inner), domain, radius, margin, mode);
}

}  // namespace lagflow
