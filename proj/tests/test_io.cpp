// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lagflow/io.hpp"

using namespace lagflow;

namespace {
std::filesystem::path tmp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "lagflow_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}
}  // namespace

TEST_CASE("OBJ round trip preserves vertices and faces bit-exactly") {
    const auto s = mesh_sphere(Vec3(0.1, -0.2, 0.3), 0.7, 2);
    const auto path = tmp_dir() / "sphere.obj";
    write_obj(s, path);
    const auto r = read_obj(path);
    REQUIRE(r.vertex_count() == s.vertex_count());
    REQUIRE(r.face_count() == s.face_count());
    for (std::size_t v = 0; v < s.vertex_count(); ++v)
        CHECK((r.vertices[v] - s.vertices[v]).norm() == 0.0);
    for (std::size_t f = 0; f < s.face_count(); ++f) CHECK(r.faces[f] == s.faces[f]);
    validate_surface(r);
}

TEST_CASE("OBJ uses 1-based face indices") {
    const auto s = mesh_sphere(Vec3::Zero(), 1.0, 0);
    const auto path = tmp_dir() / "icosa.obj";
    write_obj(s, path);
    std::ifstream in(path);
    std::string line;
    bool saw_face = false;
    while (std::getline(in, line)) {
        if (line.rfind("f ", 0) == 0) {
            saw_face = true;
            int a, b, c;
            REQUIRE(std::sscanf(line.c_str(), "f %d %d %d", &a, &b, &c) == 3);
            CHECK(a >= 1);
            CHECK(b >= 1);
            CHECK(c >= 1);
        }
    }
    CHECK(saw_face);
}

TEST_CASE("legacy VTK polydata has the expected header and counts") {
    const auto s = mesh_sphere(Vec3::Zero(), 1.0, 1);
    const auto path = tmp_dir() / "sphere.vtk";
    write_vtk_polydata(s, path, "test surface");
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# vtk DataFile Version 3.0");
    std::getline(in, line);
    CHECK(line == "test surface");
    std::getline(in, line);
    CHECK(line == "ASCII");
    std::getline(in, line);
    CHECK(line == "DATASET POLYDATA");
    std::getline(in, line);
    CHECK(line == "POINTS 42 double");
}

TEST_CASE("CSV writer emits header and rows") {
    const auto path = tmp_dir() / "series.csv";
    {
        CsvWriter csv(path, {"iter", "residual"});
        csv.row({0.0, 1.0});
        csv.row({1.0, 0.5});
    }
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "iter,residual");
    std::getline(in, line);
    CHECK(line == "0,1");
    std::getline(in, line);
    CHECK(line == "1,0.5");
}

TEST_CASE("missing file raises an error") {
    CHECK_THROWS_AS(read_obj(tmp_dir() / "nope.obj"), Error);
}
