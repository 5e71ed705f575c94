// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <concepts>
#include <functional>
#include <memory>
#include <utility>

#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"

namespace lagflow {

/// A velocity sampler: deterministic (t,x) -> velocity.
template <class F>
concept VelocityField = requires(const F& f, double t, const Vec3& x) {
    { f(t, x) } -> std::convertible_to<Vec3>;
};

/// Sampler that also exposes the exact spatial gradient (row i = grad of component i? No:
/// column convention, see below). We store J(i,j) = d u_i / d x_j.
template <class F>
concept GradientField = VelocityField<F> && requires(const F& f, double t, const Vec3& x) {
    { f.gradient(t, x) } -> std::convertible_to<Mat3>;
};

/// Central-difference Jacobian, J(i,j) = d u_i / d x_j.
template <class F>
Mat3 numeric_gradient(const F& f, double t, const Vec3& x, double h) {
    Mat3 jac;
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = h;
        const Vec3 d = (Vec3(f(t, x + e)) - Vec3(f(t, x - e))) / (2.0 * h);
        jac.col(j) = d;
    }
    return jac;
}

/// Gradient of f, exact when the field provides one, else central differences.
template <class F>
Mat3 field_gradient(const F& f, double t, const Vec3& x, double h = 1e-5) {
    if constexpr (GradientField<F>) {
        return f.gradient(t, x);
    } else {
        return numeric_gradient(f, t, x, h);
    }
}

/// Type-erased velocity sampler used wherever heterogeneous fields are stored
/// (the fixed-point context, scenario plumbing). Gradient is optional and
/// falls back to central differences.
class FieldHandle {
  public:
    using ValueFn = std::function<Vec3(double, const Vec3&)>;
    using GradientFn = std::function<Mat3(double, const Vec3&)>;

    FieldHandle() : value_([](double, const Vec3&) { return Vec3::Zero(); }) {}
    explicit FieldHandle(ValueFn value, GradientFn gradient = nullptr)
        : value_(std::move(value)), gradient_(std::move(gradient)) {}

    template <GradientField F>
    static FieldHandle wrap(F field) {
        auto shared = std::make_shared<F>(std::move(field));
        return FieldHandle([shared](double t, const Vec3& x) { return Vec3((*shared)(t, x)); },
                           [shared](double t, const Vec3& x) { return Mat3(shared->gradient(t, x)); });
    }

    template <class F>
        requires(VelocityField<F> && !GradientField<F>)
    static FieldHandle wrap(F field) {
        auto shared = std::make_shared<F>(std::move(field));
        return FieldHandle([shared](double t, const Vec3& x) { return Vec3((*shared)(t, x)); });
    }

    Vec3 operator()(double t, const Vec3& x) const { return value_(t, x); }

    [[nodiscard]] bool has_exact_gradient() const { return bool(gradient_); }

    [[nodiscard]] Mat3 gradient(double t, const Vec3& x) const {
        if (gradient_) return gradient_(t, x);
        return numeric_gradient(*this, t, x, 1e-5);
    }

  private:
    ValueFn value_;
    GradientFn gradient_;
};

/// Rigid rotation u = a x r about `center`; exact gradient is the cross-product matrix.
struct RotationField {
    Vec3 axis{0, 0, 1};
    Vec3 center{0, 0, 0};

    Vec3 operator()(double, const Vec3& x) const { return axis.cross(x - center); }
    [[nodiscard]] Mat3 gradient(double, const Vec3&) const {
        Mat3 m;
        m << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
        return m;
    }
};

struct ConstantField {
    Vec3 value{0, 0, 0};
    Vec3 operator()(double, const Vec3&) const { return value; }
    [[nodiscard]] Mat3 gradient(double, const Vec3&) const { return Mat3::Zero(); }
};

}  // namespace lagflow
