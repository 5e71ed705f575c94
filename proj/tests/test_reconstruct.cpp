// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lagflow/reconstruct.hpp"

using namespace lagflow;

namespace {

const DomainSpec kBall{Vec3::Zero(), DomainSpec::Ball{2.0}, ControlPatch{Vec3(0, 0, 1), 0.8}};

std::shared_ptr<NeumannSolver> make_solver() {
    static std::shared_ptr<NeumannSolver> solver = [] {
        auto poles = place_poles(kBall, PoleSide::outside, 0.5, 400).points;
        return std::make_shared<NeumannSolver>(kBall.boundary_samples(3), poles);
    }();
    return solver;
}

/// manufactured solenoidal field: w = curl(gaussian * a); the tail is cut far
/// below the comparison tolerance so the field is effectively compact
struct SolenoidalBump {
    Vec3 amplitude{0.8, -0.4, 1.0};
    double radius = 0.3;  // gaussian width

    [[nodiscard]] Vec3 potential(const Vec3& x) const {
        const double r2 = x.squaredNorm() / (2.0 * radius * radius);
        if (r2 > 30.0) return Vec3::Zero();
        return std::exp(-r2) * amplitude;
    }
    Vec3 operator()(double, const Vec3& x) const {  // w = curl A
        const double h = 1e-5;
        Mat3 jac;
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = h;
            jac.col(j) = (potential(x + e) - potential(x - e)) / (2.0 * h);
        }
        return Vec3(jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1));
    }
};

MarkerCloud cloud_from_field(const std::function<Vec3(const Vec3&)>& omega, double radius,
                             double spacing) {
    MarkerCloud cloud;
    cloud.cell_volume = spacing * spacing * spacing;
    const int n = int(std::ceil(2.0 * radius / spacing));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vec3 x = Vec3::Constant(-radius) + spacing * Vec3(i + 0.5, j + 0.5, k + 0.5);
                const Vec3 w = omega(x);
                if (w.norm() < 1e-12) continue;
                cloud.reference.push_back(x);
                cloud.position.push_back(x);
                cloud.omega0.push_back(w);
                cloud.omega.push_back(w);
                cloud.defgrad.push_back(Mat3::Identity());
                cloud.jacobian.push_back(1.0);
            }
    return cloud;
}

}  // namespace

TEST_CASE("zero vorticity with harmonic normal data reproduces the potential flow") {
    auto solver = make_solver();
    PointSourcePotential theta;
    theta.poles = {Vec3(0.4, -0.2, 3.2), Vec3(-1.0, 0.5, -3.4)};
    theta.weights = {2.0, -1.3};
    theta.linear = Vec3(0.1, 0.3, -0.2);
    const auto& bd = solver->samples();
    std::vector<double> data(bd.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < bd.size(); ++i) {
        data[i] = theta.gradient(bd.points[i]).dot(bd.normals[i]);
        mean += bd.weights[i] * data[i];
    }
    for (auto& d : data) d -= mean / bd.total_weight();

    const auto v = div_curl_reconstruct(MarkerCloud{}, *solver, data);
    SplitMix64 rng(3);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Vec3 p = 1.5 * rng.direction() * std::cbrt(rng.next_double());
        err = std::max(err, (Vec3(v(0.0, p)) - theta.gradient(p)).norm());
        scale = std::max(scale, theta.gradient(p).norm());
    }
    CHECK(err / scale < 1e-4);
}

TEST_CASE("manufactured solenoidal field is recovered to 5% relative L2") {
    auto solver = make_solver();
    const SolenoidalBump w;
    const auto omega = [&](const Vec3& x) {
        const double h = 1e-5;
        Mat3 jac;
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = h;
            jac.col(j) = (Vec3(w(0.0, x + e)) - Vec3(w(0.0, x - e))) / (2.0 * h);
        }
        return Vec3(jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1));
    };
    const auto cloud = cloud_from_field(omega, 3.4 * w.radius, w.radius / 6.0);
    REQUIRE(cloud.size() > 5000);

    const std::vector<double> data(solver->samples().size(), 0.0);  // w.n = 0 on the boundary
    ReconstructOptions opts;
    opts.core_radius = 1.5 * w.radius / 6.0;  // resolve the gaussian core
    const auto v = div_curl_reconstruct(cloud, *solver, data, {}, opts);

    SplitMix64 rng(7);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 300; ++i) {
        const Vec3 p = 2.0 * w.radius * rng.direction() * std::cbrt(rng.next_double());
        const Vec3 exact = w(0.0, p);
        num += (Vec3(v(0.0, p)) - exact).squaredNorm();
        den += exact.squaredNorm();
    }
    CHECK(std::sqrt(num / den) < 0.05);
}

TEST_CASE("zero data gives the zero field") {
    auto solver = make_solver();
    const std::vector<double> data(solver->samples().size(), 0.0);
    const auto v = div_curl_reconstruct(MarkerCloud{}, *solver, data);
    SplitMix64 rng(11);
    for (int i = 0; i < 30; ++i) {
        const Vec3 p = 1.8 * rng.direction() * rng.next_double();
        CHECK(Vec3(v(0.0, p)).norm() < 1e-8);
    }
}

TEST_CASE("reconstructed field is exactly divergence-free") {
    auto solver = make_solver();
    const SolenoidalBump w;
    const auto omega = [&](const Vec3& x) {
        return Vec3(numeric_gradient(w, 0.0, x, 1e-5)(2, 1) -
                        numeric_gradient(w, 0.0, x, 1e-5)(1, 2),
                    numeric_gradient(w, 0.0, x, 1e-5)(0, 2) -
                        numeric_gradient(w, 0.0, x, 1e-5)(2, 0),
                    numeric_gradient(w, 0.0, x, 1e-5)(1, 0) -
                        numeric_gradient(w, 0.0, x, 1e-5)(0, 1));
    };
    const auto cloud = cloud_from_field(omega, 3.0 * w.radius, w.radius / 1.5);
    const std::vector<double> data(solver->samples().size(), 0.0);
    const auto v = div_curl_reconstruct(cloud, *solver, data);
    SplitMix64 rng(13);
    for (int i = 0; i < 30; ++i) {
        const Vec3 p = 1.5 * rng.direction() * std::cbrt(rng.next_double());
        const Mat3 jac = v.gradient(0.0, p);
        CHECK(std::abs(jac.trace()) < 1e-11 * (jac.norm() + 1.0));
    }
}

TEST_CASE("incompatible normal data is rejected") {
    auto solver = make_solver();
    std::vector<double> data(solver->samples().size(), 1.0);  // large nonzero mean
    CHECK_THROWS_AS(div_curl_reconstruct(MarkerCloud{}, *solver, data), CompatibilityError);
}

TEST_CASE("empty cohomology basis yields the empty coefficient list") {
    auto solver = make_solver();
    const std::vector<double> data(solver->samples().size(), 0.0);
    const auto v = div_curl_reconstruct(MarkerCloud{}, *solver, data);
    const auto lambda =
        lambda_update(ConstantField{Vec3(1, 0, 0)}, MarkerCloud{}, v, {}, CohomologyBasis{}, 0.5);
    CHECK(lambda.empty());
}

namespace {

CohomologyBasis box_basis() {
    CohomologyBasis basis;
    basis.fields.push_back(FieldHandle([](double, const Vec3&) { return Vec3(1, 0, 0); }));
    basis.fields.push_back(FieldHandle([](double, const Vec3&) { return Vec3(0, 1, 0); }));
    // quadrature over the unit box [0,1]^3
    const int n = 6;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                basis.quadrature_points.push_back(Vec3((i + 0.5) / n, (j + 0.5) / n, (k + 0.5) / n));
                basis.quadrature_weights.push_back(1.0 / (n * n * n));
            }
    return basis;
}

}  // namespace

TEST_CASE("injected orthonormal basis: lambda matches hand quadrature") {
    const auto basis = box_basis();
    // v constant: pair(v, Q1) = vx, pair(v, Q2) = vy; Gram = identity
    const Vec3 vconst(0.7, -0.3, 0.2);
    const FieldHandle v([&](double, const Vec3&) { return vconst; });
    const std::vector<double> u0_pairings = {0.1, -0.05};
    const auto lambda = lambda_update(ConstantField{Vec3::Zero()}, MarkerCloud{}, v, u0_pairings,
                                      basis, 0.3);
    REQUIRE(lambda.size() == 2);
    CHECK(lambda[0] == doctest::Approx(0.1 - 0.7).epsilon(1e-10));
    CHECK(lambda[1] == doctest::Approx(-0.05 + 0.3).epsilon(1e-10));
}

TEST_CASE("zero vorticity keeps lambda constant across time pushes") {
    const auto basis = box_basis();
    LambdaTracker tracker(&basis);
    const FieldHandle v([](double, const Vec3&) { return Vec3(0.2, 0.4, 0.0); });
    const std::vector<double> u0_pairings = {0.0, 0.0};
    std::vector<double> first;
    for (double t : {0.0, 0.25, 0.5, 1.0}) {
        tracker.push(t, tracker.integrand(ConstantField{Vec3(1, 1, 1)}, MarkerCloud{}, t));
        const auto lambda = tracker.solve(v, u0_pairings, t);
        if (first.empty()) first = lambda;
        for (std::size_t j = 0; j < lambda.size(); ++j)
            CHECK(lambda[j] == doctest::Approx(first[j]).epsilon(1e-12));
    }
}

TEST_CASE("degenerate injected basis is rejected (singular Gram)") {
    CohomologyBasis basis = box_basis();
    basis.fields[1] = FieldHandle([](double, const Vec3&) { return Vec3::Zero(); });
    const FieldHandle v([](double, const Vec3&) { return Vec3(1, 0, 0); });
    CHECK_THROWS_AS(lambda_update(ConstantField{Vec3::Zero()}, MarkerCloud{}, v, {0.0, 0.0}, basis, 0.1),
                    ParameterError);
}
