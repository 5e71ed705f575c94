// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lagflow/mesh.hpp"
#include "lagflow/neumann.hpp"

using namespace lagflow;

namespace {

std::vector<Vec3> ball_points(double radius, int count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Vec3> pts;
    while (int(pts.size()) < count) {
        const Vec3 x = rng.point_in_box(Vec3::Constant(-radius), Vec3::Constant(radius));
        if (x.norm() < radius) pts.push_back(x);
    }
    return pts;
}

std::vector<Vec3> sphere_shell(double radius, int count) {
    std::vector<Vec3> pts;
    for (const auto& d : fibonacci_directions(count)) pts.push_back(radius * d);
    return pts;
}

}  // namespace

TEST_CASE("affine targets are reproduced exactly") {
    PointSourcePotential target;
    target.linear = Vec3(1.0, 0.0, 0.0);  // x1
    const auto match = ball_points(0.8, 60, 5);
    const auto small = sphere_shell(1.5, 40);
    auto [phi, rep] = harmonic_approx(target, match, small, sphere_shell(3.0, 80), 0.0);
    CHECK(rep.match_residual < 1e-10);
    for (const auto& x : match) CHECK((phi.gradient(x) - target.gradient(x)).norm() < 1e-9);
}

TEST_CASE("Runge sweep: match residual decreases with pole count, final error <= 1e-4") {
    // target harmonic on the match ball: an exterior point source
    PointSourcePotential target;
    target.poles = {Vec3(1.71, 0.504, -0.18)};
    target.weights = {3.0};
    const auto match = ball_points(0.8, 250, 9);

    double prev = std::numeric_limits<double>::max();
    PointSourcePotential last;
    for (int np : {50, 100, 200, 400}) {
        auto [phi, rep] = harmonic_approx(target, match, {}, sphere_shell(2.5, np), 0.0);
        CHECK(rep.match_residual < prev);
        prev = rep.match_residual;
        last = phi;
    }
    double err = 0.0, scale = 0.0;
    for (const auto& x : ball_points(0.75, 60, 33)) {
        err = std::max(err, (last.gradient(x) - target.gradient(x)).norm());
        scale = std::max(scale, target.gradient(x).norm());
    }
    CHECK(err / scale <= 1e-4);
}

TEST_CASE("large smallness weight drives the potential to zero on the small region") {
    PointSourcePotential target;
    target.linear = Vec3(0.0, 0.0, 1.0);
    const auto match = ball_points(0.5, 40, 13);
    const auto small = sphere_shell(1.8, 60);
    const auto poles = sphere_shell(3.0, 100);

    auto [phi_micro, rep_micro] = harmonic_approx(target, match, small, poles, 1e-6);
    auto [phi_huge, rep_huge] = harmonic_approx(target, match, small, poles, 1e8);

    double small_micro = 0.0, small_huge = 0.0;
    for (const auto& x : small) {
        small_micro = std::max(small_micro, std::abs(phi_micro(x)) + phi_micro.gradient(x).norm());
        small_huge = std::max(small_huge, std::abs(phi_huge(x)) + phi_huge.gradient(x).norm());
    }
    CHECK(small_huge < 1e-3 * small_micro);
    CHECK(rep_huge.match_residual > 10.0 * rep_micro.match_residual);
}

TEST_CASE("empty match region is a parameter error") {
    PointSourcePotential target;
    CHECK_THROWS_AS(harmonic_approx(target, {}, {}, sphere_shell(2.0, 10), 1.0), ParameterError);
}

TEST_CASE("pole touching a probe region is rejected") {
    PointSourcePotential target;
    target.linear = Vec3(1.0, 0.0, 0.0);
    std::vector<Vec3> match = {Vec3(0.5, 0.0, 0.0)};
    std::vector<Vec3> poles = sphere_shell(2.0, 8);
    poles.push_back(Vec3(0.5, 0.0, 1e-9));  // on top of a match point
    CHECK_THROWS_AS(harmonic_approx(target, match, {}, poles, 1.0), ParameterError);
}

TEST_CASE("boundary correction seals the boundary for a linear candidate") {
    // Omega = unit ball, control patch the cap z > 0.8.
    const DomainSpec domain(Vec3::Zero(), DomainSpec::Ball{1.0}, ControlPatch{Vec3(0, 0, 1), 0.8});
    const NeumannSolver solver(domain.boundary_samples(3),
                               place_poles(domain, PoleSide::outside, 0.5, 400).points);
    PointSourcePotential candidate;
    candidate.linear = Vec3(0.0, 0.0, 1.0);  // x3

    auto [corrected, rep] = boundary_correction(candidate, solver);
    CHECK_FALSE(rep.trivial);
    // The constant extension of d into the patch is discontinuous at the patch
    // edge for a candidate with O(1) sealed flux, so the fit rings there; the
    // reference run gives 4.3e-2 and refinement does not lower it. Pipeline
    // candidates have near-zero sealed flux and seal to 1e-3 and below (see the
    // control synthesis tests).
    CHECK(rep.tol_seal <= 5e-2);
    CHECK(rep.data_ratio > 0.0);
    // the correction removes most of the sealed flux of the candidate
    double before = 0.0;
    const auto& bd = solver.samples();
    for (std::size_t i = 0; i < bd.size(); ++i)
        if (bd.tags[i] == BoundaryRegion::sealed_boundary)
            before = std::max(before,
                              std::abs(candidate.gradient(bd.points[i]).dot(bd.normals[i])));
    CHECK(rep.tol_seal < 0.06 * before);

    // corrected potential is still harmonic away from its poles
    SplitMix64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const Vec3 x = 0.6 * rng.direction();
        CHECK(std::abs(numeric_laplacian(corrected, x, 1e-4)) <
              1e-5 * (corrected.gradient(x).norm() + 1.0) / 1e-4);
    }
}

TEST_CASE("candidate already sealed: correction is a near-constant") {
    const DomainSpec domain(Vec3::Zero(), DomainSpec::Ball{1.0}, ControlPatch{Vec3(0, 0, 1), 0.8});
    const NeumannSolver solver(domain.boundary_samples(3),
                               place_poles(domain, PoleSide::outside, 0.5, 400).points);
    PointSourcePotential candidate;  // identically zero
    auto [corrected, rep] = boundary_correction(candidate, solver);
    CHECK(rep.tol_seal < 1e-10);
    SplitMix64 rng(5);
    for (int i = 0; i < 10; ++i)
        CHECK(corrected.gradient(0.7 * rng.direction()).norm() < 1e-8);
}

TEST_CASE("control patch covering the whole boundary makes the correction trivial") {
    const DomainSpec domain(Vec3::Zero(), DomainSpec::Ball{1.0},
                            ControlPatch{Vec3(0, 0, 1), -1.1});  // every sample in the patch
    const NeumannSolver solver(domain.boundary_samples(2),
                               place_poles(domain, PoleSide::outside, 0.5, 100).points);
    PointSourcePotential candidate;
    candidate.linear = Vec3(1.0, 2.0, 3.0);
    auto [corrected, rep] = boundary_correction(candidate, solver);
    CHECK(rep.trivial);
    CHECK((corrected.linear - candidate.linear).norm() == 0.0);
}

TEST_CASE("cohomology basis of the supported domains is empty") {
    CHECK(cohomology_basis(DomainSpec(Vec3::Zero(), DomainSpec::Ball{2.0})).empty());
    CHECK(cohomology_basis(DomainSpec(Vec3::Zero(), DomainSpec::Ellipsoid{Vec3(1, 2, 3)})).empty());
}
