// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lagflow/mesh.hpp"
#include "lagflow/neumann.hpp"

using namespace lagflow;

namespace {

std::vector<double> normal_data(const BoundarySampleSet& samples,
                                const std::function<Vec3(const Vec3&)>& grad) {
    std::vector<double> flux(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        flux[i] = grad(samples.points[i]).dot(samples.normals[i]);
    return flux;
}

std::vector<Vec3> interior_probes(int count, double radius, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Vec3> probes;
    while (int(probes.size()) < count) {
        const Vec3 x = rng.point_in_box(Vec3::Constant(-radius), Vec3::Constant(radius));
        if (x.norm() < radius) probes.push_back(x);
    }
    return probes;
}

/// max gradient error over probes, relative to the exact gradient scale.
double relative_gradient_error(const PointSourcePotential& phi,
                               const std::function<Vec3(const Vec3&)>& exact,
                               const std::vector<Vec3>& probes) {
    double err = 0.0, scale = 0.0;
    for (const auto& x : probes) {
        err = std::max(err, (phi.gradient(x) - exact(x)).norm());
        scale = std::max(scale, exact(x).norm());
    }
    return err / std::max(scale, 1e-30);
}

/// subtract the weighted mean so midpoint-quadrature data is exactly compatible.
void project_mean(std::vector<double>& flux, const BoundarySampleSet& samples) {
    double mean = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) mean += samples.weights[i] * flux[i];
    mean /= samples.total_weight();
    for (auto& f : flux) f -= mean;
}

}  // namespace

TEST_CASE("linear flux is reproduced exactly through the affine part") {
    const auto sphere = mesh_sphere(Vec3::Zero(), 1.0, 4);
    const auto samples = surface_samples(sphere);
    const auto flux = normal_data(samples, [](const Vec3&) { return Vec3(1.0, 0.0, 0.0); });
    auto [phi, report] = solve_neumann(sphere, flux, 400, 0.5);
    CHECK(report.relative_residual < 1e-10);
    for (const auto& x : interior_probes(50, 0.9, 3)) {
        CHECK((phi.gradient(x) - Vec3(1.0, 0.0, 0.0)).norm() < 1e-6);
    }
}

TEST_CASE("harmonic polynomial x1 x2 is recovered to 1e-4 relative gradient error") {
    const auto sphere = mesh_sphere(Vec3::Zero(), 1.0, 4);
    const auto samples = surface_samples(sphere);
    const auto flux =
        normal_data(samples, [](const Vec3& x) { return Vec3(x.y(), x.x(), 0.0); });
    auto [phi, report] = solve_neumann(sphere, flux, 400, 0.5);
    const double worst = relative_gradient_error(
        phi, [](const Vec3& x) { return Vec3(x.y(), x.x(), 0.0); }, interior_probes(50, 0.9, 7));
    CHECK(worst < 1e-4);
}

TEST_CASE("zero flux gives a constant potential") {
    const auto sphere = mesh_sphere(Vec3::Zero(), 1.0, 3);
    const std::vector<double> flux(sphere.face_count(), 0.0);
    auto [phi, report] = solve_neumann(sphere, flux);
    for (const auto& x : interior_probes(20, 0.9, 11)) CHECK(phi.gradient(x).norm() < 1e-8);
}

TEST_CASE("incompatible flux is rejected") {
    const auto sphere = mesh_sphere(Vec3::Zero(), 1.0, 3);
    const std::vector<double> flux(sphere.face_count(), 1.0);  // mean is far from zero
    CHECK_THROWS_AS(solve_neumann(sphere, flux), CompatibilityError);
}

TEST_CASE("Neumann uniqueness: different pole layouts agree on interior gradients") {
    const auto sphere = mesh_sphere(Vec3::Zero(), 1.0, 3);
    const auto samples = surface_samples(sphere);
    // harmonic target: potential of an exterior source plus a linear drift
    PointSourcePotential target;
    target.poles = {Vec3(0.0, 0.0, 2.0)};
    target.weights = {2.5};
    target.linear = Vec3(0.2, -0.1, 0.3);
    auto flux = normal_data(samples, [&](const Vec3& x) { return Vec3(target.gradient(x)); });
    project_mean(flux, samples);  // midpoint quadrature leaves a small mean defect

    auto [phi_a, rep_a] = solve_neumann(sphere, flux, 300, 0.45);
    auto [phi_b, rep_b] = solve_neumann(sphere, flux, 420, 0.6);
    const double tol = 3.0 * std::max({rep_a.relative_residual, rep_b.relative_residual, 1e-9});
    for (const auto& x : interior_probes(30, 0.85, 17)) {
        const double scale = target.gradient(x).norm();
        CHECK((phi_a.gradient(x) - phi_b.gradient(x)).norm() <= tol * scale + 1e-12);
    }
}

TEST_CASE("solver reproduces degree-2 harmonic polynomials via manufactured solutions") {
    const auto sphere = mesh_sphere(Vec3::Zero(), 1.0, 4);
    const auto samples = surface_samples(sphere);
    // x^2 - z^2 is harmonic; gradient (2x, 0, -2z)
    const auto flux =
        normal_data(samples, [](const Vec3& x) { return Vec3(2.0 * x.x(), 0.0, -2.0 * x.z()); });
    auto [phi, report] = solve_neumann(sphere, flux, 400, 0.5);
    const double worst = relative_gradient_error(
        phi, [](const Vec3& x) { return Vec3(2.0 * x.x(), 0.0, -2.0 * x.z()); },
        interior_probes(50, 0.9, 23));
    CHECK(worst < 1e-4);
}

TEST_CASE("gauge: potential has zero weighted mean over the samples") {
    const auto sphere = mesh_sphere(Vec3::Zero(), 1.0, 3);
    const auto samples = surface_samples(sphere);
    const auto flux =
        normal_data(samples, [](const Vec3& x) { return Vec3(x.y(), x.x(), 0.0); });
    auto [phi, report] = solve_neumann(sphere, flux);
    double mean = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        mean += samples.weights[i] * phi(samples.points[i]);
    CHECK(std::abs(mean / samples.total_weight()) < 1e-12);
}
