// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/mesh.hpp"

namespace lagflow {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Wavefront OBJ export: `v x y z` and 1-based `f i j k` lines.
inline void write_obj(const TriangulatedSurface& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_obj: cannot open " + path.string());
    for (const auto& v : s.vertices)
        out << "v " << detail::fmt_double(v.x()) << ' ' << detail::fmt_double(v.y()) << ' '
            << detail::fmt_double(v.z()) << '\n';
    for (const auto& f : s.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline TriangulatedSurface read_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_obj: cannot open " + path.string());
    TriangulatedSurface s;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x() >> v.y() >> v.z();
            if (!ss) throw Error("read_obj: malformed vertex line");
            s.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                ss >> tok;
                if (tok.empty()) throw Error("read_obj: malformed face line");
                f[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            s.faces.push_back(f);
        }
    }
    return s;
}

/// Legacy-VTK ASCII POLYDATA export for standard viewers.
inline void write_vtk_polydata(const TriangulatedSurface& s, const std::filesystem::path& path,
                               const std::string& title = "surface") {
    std::ofstream out(path);
    if (!out) throw Error("write_vtk_polydata: cannot open " + path.string());
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << s.vertices.size() << " double\n";
    for (const auto& v : s.vertices)
        out << detail::fmt_double(v.x()) << ' ' << detail::fmt_double(v.y()) << ' '
            << detail::fmt_double(v.z()) << '\n';
    out << "POLYGONS " << s.faces.size() << ' ' << 4 * s.faces.size() << '\n';
    for (const auto& f : s.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

/// Minimal CSV writer: header row then data rows, %.17g formatting.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw Error("CsvWriter: cannot open " + path.string());
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << detail::fmt_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
    }

  private:
    std::ofstream out_;
};

}  // namespace lagflow
