// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lagflow/field.hpp"
#include "lagflow/mesh.hpp"

using namespace lagflow;

TEST_CASE("icosahedron combinatorics at level 0") {
    const auto s = mesh_sphere(Vec3::Zero(), 1.0, 0);
    CHECK(s.vertex_count() == 12);
    CHECK(s.face_count() == 20);
    validate_surface(s);
}

TEST_CASE("subdivision counts: level 3 has 642 vertices, 1280 faces") {
    const auto s = mesh_sphere(Vec3::Zero(), 1.0, 3);
    CHECK(s.vertex_count() == 642);
    CHECK(s.face_count() == 1280);
    validate_surface(s);
}

TEST_CASE("vertex count is 10 * 4^level + 2 across levels") {
    for (int level = 0; level <= 4; ++level) {
        const auto s = mesh_sphere(Vec3::Zero(), 1.0, level);
        CHECK(s.vertex_count() == std::size_t(10 * (1 << (2 * level)) + 2));
        CHECK(s.face_count() == std::size_t(20 * (1 << (2 * level))));
    }
}

TEST_CASE("vertices project exactly onto the requested sphere") {
    const Vec3 c(1.0, 2.0, 3.0);
    const auto s = mesh_sphere(c, 0.5, 2);
    for (const auto& v : s.vertices) CHECK((v - c).norm() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("level out of range is a parameter error") {
    CHECK_THROWS_AS(mesh_sphere(Vec3::Zero(), 1.0, -1), ParameterError);
    CHECK_THROWS_AS(mesh_sphere(Vec3::Zero(), 1.0, 8), ParameterError);
    CHECK_THROWS_AS(mesh_sphere(Vec3::Zero(), -1.0, 2), ParameterError);
}

TEST_CASE("enclosed volume of the unit icosphere approaches 4 pi / 3") {
    const auto s = mesh_sphere(Vec3::Zero(), 1.0, 4);
    const double exact = 4.0 * pi / 3.0;
    CHECK(std::abs(enclosed_volume(s) - exact) / exact < 0.003);
}

TEST_CASE("enclosed volume is translation invariant") {
    const auto s = mesh_sphere(Vec3::Zero(), 1.0, 3);
    auto t = s;
    for (auto& v : t.vertices) v += Vec3(11.0, -4.0, 2.5);
    CHECK(enclosed_volume(t) ==
          doctest::Approx(enclosed_volume(s)).epsilon(1e-12));
}

TEST_CASE("orientation flip negates the volume and fails validation") {
    auto s = mesh_sphere(Vec3::Zero(), 1.0, 2);
    const double vol = enclosed_volume(s);
    s.flip_orientation();
    CHECK(enclosed_volume(s) == doctest::Approx(-vol).epsilon(1e-14));
    CHECK_THROWS_AS(validate_surface(s), InvariantViolation);
}

TEST_CASE("open mesh is rejected") {
    auto s = mesh_sphere(Vec3::Zero(), 1.0, 1);
    s.faces.pop_back();
    CHECK_THROWS_AS(validate_surface(s), InvariantViolation);
}

TEST_CASE("flux of a constant field through a closed surface vanishes") {
    const auto s = mesh_sphere(Vec3(0.3, -0.1, 0.2), 0.8, 3);
    const ConstantField c{Vec3(1.0, -2.0, 0.5)};
    const double flux = surface_flux(s, c, 0.0);
    CHECK(std::abs(flux) < 1e-10 * c.value.norm() * s.area());
}

TEST_CASE("flux of the identity field equals 3 x enclosed volume") {
    const auto s = mesh_sphere(Vec3::Zero(), 1.0, 4);
    const auto identity = [](double, const Vec3& x) { return x; };
    CHECK(surface_flux(s, identity, 0.0) ==
          doctest::Approx(3.0 * enclosed_volume(s)).epsilon(1e-12));
}
