// Copyright 2026 The viewplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VIEWPLAN_MESH_HPP_
#define VIEWPLAN_MESH_HPP_

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "viewplan/common.hpp"

namespace viewplan {

enum class MeshFormat { Auto, Obj, Stl, Ply };

/// What happened while building a mesh from raw data.
struct LoadReport {
    std::size_t input_triangles = 0;
    std::size_t dropped_degenerate = 0;   // zero-area or repeated-vertex triangles
    std::size_t welded_vertices = 0;      // vertices merged into an earlier one
    std::size_t unreferenced_vertices = 0;
};

/// Weld tolerance in meters. Building-scale inputs keep this safely below
/// any real feature size.
constexpr double kWeldTolerance = 1e-6;

/// Triangles below this area are considered degenerate and dropped.
constexpr double kDegenerateArea = 1e-12;

/// Default ceiling on subdivision output size.
constexpr std::size_t kDefaultSubdivisionCap = 200000;

// ---------------------------------------------------------------------------
// TriangleMesh
//
// Indexed triangle soup with per-triangle centroid, unit normal and area
// cached at construction. Immutable after construction; concurrent reads
// are safe.
// ---------------------------------------------------------------------------

class TriangleMesh {
public:
    TriangleMesh() = default;

    /// Builds a mesh from raw vertices and index triples: welds vertices
    /// within kWeldTolerance, validates indices, drops degenerate triangles,
    /// drops unreferenced vertices, and fills the per-triangle caches.
    static TriangleMesh from_soup(const std::vector<Vec3>& vertices,
                                  const std::vector<std::array<int, 3>>& triangles,
                                  LoadReport* report = nullptr);

    static TriangleMesh load(const std::string& path, MeshFormat format = MeshFormat::Auto,
                             LoadReport* report = nullptr);

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }
    bool empty() const { return triangles_.empty(); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

    const Vec3& centroid(std::size_t t) const { return centroids_[t]; }
    const Vec3& normal(std::size_t t) const { return normals_[t]; }
    double area(std::size_t t) const { return areas_[t]; }
    double total_area() const { return total_area_; }

    std::array<Vec3, 3> triangle_vertices(std::size_t t) const {
        const auto& tri = triangles_[t];
        return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
    }

    /// Tight axis-aligned bounds over all (referenced) vertices.
    Aabb bounding_box() const {
        if (empty()) throw GeometryError("bounding_box: empty mesh");
        Aabb box;
        for (const auto& v : vertices_) box.extend(v);
        return box;
    }

    /// Longest-edge bisection until every triangle area is <= max_area.
    /// Preserves the surface exactly (children partition the parent) and
    /// therefore preserves total area and per-triangle supporting planes.
    TriangleMesh subdivided(double max_area, std::size_t cap = kDefaultSubdivisionCap) const;

    /// Reverses the winding of every triangle and negates cached normals.
    TriangleMesh flipped() const;

private:
    void build_caches();

    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<Vec3> centroids_;
    std::vector<Vec3> normals_;
    std::vector<double> areas_;
    double total_area_ = 0.0;
};

namespace detail {

// Spatial hash on coordinates quantized by the weld tolerance. Neighboring
// cells are probed so near-boundary pairs still merge.
class VertexWelder {
public:
    explicit VertexWelder(double tol) : tol_(tol) {}

    int add(const Vec3& v, std::vector<Vec3>& out) {
        const std::int64_t qx = quantize(v.x()), qy = quantize(v.y()), qz = quantize(v.z());
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = cells_.find(key(qx + dx, qy + dy, qz + dz));
                    if (it == cells_.end()) continue;
                    for (int idx : it->second)
                        if ((out[idx] - v).norm() <= tol_) return idx;
                }
        const int idx = static_cast<int>(out.size());
        out.push_back(v);
        cells_[key(qx, qy, qz)].push_back(idx);
        return idx;
    }

private:
    std::int64_t quantize(double c) const { return static_cast<std::int64_t>(std::floor(c / tol_)); }
    static std::uint64_t key(std::int64_t x, std::int64_t y, std::int64_t z) {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : {x, y, z}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }

    double tol_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace detail

inline TriangleMesh TriangleMesh::from_soup(const std::vector<Vec3>& vertices,
                                            const std::vector<std::array<int, 3>>& triangles,
                                            LoadReport* report) {
    LoadReport local;
    local.input_triangles = triangles.size();

    // Weld pass.
    detail::VertexWelder welder(kWeldTolerance);
    std::vector<Vec3> welded;
    welded.reserve(vertices.size());
    std::vector<int> remap(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (!vertices[i].allFinite()) throw ParseError("mesh: non-finite vertex coordinate");
        remap[i] = welder.add(vertices[i], welded);
    }
    local.welded_vertices = vertices.size() - welded.size();

    TriangleMesh mesh;
    std::vector<int> used(welded.size(), -1);
    const int nv = static_cast<int>(vertices.size());
    for (const auto& tri : triangles) {
        std::array<int, 3> t{};
        bool valid = true;
        for (int c = 0; c < 3; ++c) {
            if (tri[c] < 0 || tri[c] >= nv) {
                throw ParseError("mesh: triangle references vertex " + std::to_string(tri[c]) +
                                 " outside [0, " + std::to_string(nv) + ")");
            }
            t[c] = remap[tri[c]];
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) valid = false;
        if (valid &&
            detail::triangle_area(welded[t[0]], welded[t[1]], welded[t[2]]) < kDegenerateArea)
            valid = false;
        if (!valid) {
            ++local.dropped_degenerate;
            continue;
        }
        for (int c = 0; c < 3; ++c) {
            if (used[t[c]] < 0) {
                used[t[c]] = static_cast<int>(mesh.vertices_.size());
                mesh.vertices_.push_back(welded[t[c]]);
            }
            t[c] = used[t[c]];
        }
        mesh.triangles_.push_back(t);
    }
    local.unreferenced_vertices =
        welded.size() - static_cast<std::size_t>(std::count_if(used.begin(), used.end(),
                                                               [](int u) { return u >= 0; }));

    if (mesh.triangles_.empty()) throw GeometryError("mesh: zero valid triangles");
    mesh.build_caches();
    if (report) *report = local;
    return mesh;
}

inline void TriangleMesh::build_caches() {
    const std::size_t n = triangles_.size();
    centroids_.resize(n);
    normals_.resize(n);
    areas_.resize(n);
    total_area_ = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const Vec3& a = vertices_[triangles_[t][0]];
        const Vec3& b = vertices_[triangles_[t][1]];
        const Vec3& c = vertices_[triangles_[t][2]];
        centroids_[t] = (a + b + c) / 3.0;
        const Vec3 cr = (b - a).cross(c - a);
        areas_[t] = 0.5 * cr.norm();
        normals_[t] = cr.normalized();
        total_area_ += areas_[t];
    }
}

inline TriangleMesh TriangleMesh::flipped() const {
    TriangleMesh out = *this;
    for (auto& tri : out.triangles_) std::swap(tri[1], tri[2]);
    for (auto& n : out.normals_) n = -n;
    return out;
}

inline TriangleMesh TriangleMesh::subdivided(double max_area, std::size_t cap) const {
    if (max_area <= 0.0) throw GeometryError("subdivide: max_area must be > 0");

    std::vector<Vec3> verts = vertices_;
    std::vector<std::array<int, 3>> out;
    out.reserve(triangles_.size());
    // Midpoints shared between sibling splits through an edge key map, so the
    // vertex array does not balloon.
    std::map<std::pair<int, int>, int> midpoint;
    auto edge_midpoint = [&](int a, int b) {
        const std::pair<int, int> k{std::min(a, b), std::max(a, b)};
        auto it = midpoint.find(k);
        if (it != midpoint.end()) return it->second;
        const int idx = static_cast<int>(verts.size());
        verts.push_back(0.5 * (verts[a] + verts[b]));
        midpoint.emplace(k, idx);
        return idx;
    };

    std::deque<std::array<int, 3>> work(triangles_.begin(), triangles_.end());
    while (!work.empty()) {
        auto tri = work.front();
        work.pop_front();
        if (detail::triangle_area(verts[tri[0]], verts[tri[1]], verts[tri[2]]) <= max_area) {
            out.push_back(tri);
            continue;
        }
        // Split across the longest edge.
        int longest = 0;
        double best = -1.0;
        for (int e = 0; e < 3; ++e) {
            double len = (verts[tri[(e + 1) % 3]] - verts[tri[e]]).squaredNorm();
            if (len > best) {
                best = len;
                longest = e;
            }
        }
        const int a = tri[longest], b = tri[(longest + 1) % 3], c = tri[(longest + 2) % 3];
        const int m = edge_midpoint(a, b);
        work.push_back({a, m, c});
        work.push_back({m, b, c});
        // Every queued triangle reaches the output, so work + out already
        // lower-bounds the final size.
        if (work.size() + out.size() > cap)
            throw GeometryError("subdivide: output exceeds cap of " + std::to_string(cap) +
                                " triangles");
    }

    TriangleMesh result;
    // No weld pass here: indices are already consistent and midpoints shared.
    result.vertices_ = std::move(verts);
    result.triangles_ = std::move(out);
    result.build_caches();
    return result;
}

// ---------------------------------------------------------------------------
// Loaders
// ---------------------------------------------------------------------------

namespace detail {

inline MeshFormat infer_format(const std::string& path) {
    auto ext = std::filesystem::path(path).extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".obj") return MeshFormat::Obj;
    if (ext == ".stl") return MeshFormat::Stl;
    if (ext == ".ply") return MeshFormat::Ply;
    throw ParseError("cannot infer mesh format from extension '" + ext + "'");
}

struct RawMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    // Fan-triangulate a polygon face record.
    void add_face(const std::vector<int>& poly) {
        for (std::size_t i = 2; i < poly.size(); ++i)
            triangles.push_back({poly[0], poly[i - 1], poly[i]});
    }
};

inline RawMesh parse_obj(std::istream& in) {
    RawMesh raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag.empty() || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw ParseError("OBJ line " + std::to_string(line_no) + ": bad vertex record");
            raw.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string item;
            while (ls >> item) {
                // "f v", "f v/vt", "f v/vt/vn", "f v//vn"; only v is used.
                const int idx = std::stoi(item.substr(0, item.find('/')));
                const int nverts = static_cast<int>(raw.vertices.size());
                // OBJ indices are 1-based; negative indices count from the end.
                const int resolved = idx > 0 ? idx - 1 : nverts + idx;
                if (resolved < 0 || resolved >= nverts)
                    throw ParseError("OBJ line " + std::to_string(line_no) +
                                     ": face index out of range");
                poly.push_back(resolved);
            }
            if (poly.size() < 3)
                throw ParseError("OBJ line " + std::to_string(line_no) +
                                 ": face with fewer than 3 vertices");
            raw.add_face(poly);
        }
        // All other record types (vn, vt, usemtl, o, g, s, ...) are ignored.
    }
    return raw;
}

inline RawMesh parse_stl_ascii(std::istream& in) {
    RawMesh raw;
    std::string tok;
    std::vector<Vec3> facet;
    std::size_t tok_no = 0;
    while (in >> tok) {
        ++tok_no;
        if (tok == "vertex") {
            double x, y, z;
            if (!(in >> x >> y >> z))
                throw ParseError("STL: bad vertex near token " + std::to_string(tok_no));
            facet.emplace_back(x, y, z);
        } else if (tok == "endfacet") {
            if (facet.size() != 3)
                throw ParseError("STL: facet with " + std::to_string(facet.size()) + " vertices");
            const int base = static_cast<int>(raw.vertices.size());
            for (const auto& v : facet) raw.vertices.push_back(v);
            raw.triangles.push_back({base, base + 1, base + 2});
            facet.clear();
        }
        // "facet normal x y z" records are skipped; winding is authoritative.
    }
    return raw;
}

inline RawMesh parse_stl_binary(std::istream& in) {
    char header[80];
    in.read(header, 80);
    std::uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 4);
    if (!in) throw ParseError("STL: truncated binary header");
    RawMesh raw;
    raw.vertices.reserve(count * 3);
    raw.triangles.reserve(count);
    for (std::uint32_t t = 0; t < count; ++t) {
        float buf[12];
        in.read(reinterpret_cast<char*>(buf), 48);
        std::uint16_t attr;
        in.read(reinterpret_cast<char*>(&attr), 2);
        if (!in) throw ParseError("STL: truncated at facet " + std::to_string(t));
        const int base = static_cast<int>(raw.vertices.size());
        for (int v = 0; v < 3; ++v)
            raw.vertices.emplace_back(buf[3 + 3 * v], buf[4 + 3 * v], buf[5 + 3 * v]);
        raw.triangles.push_back({base, base + 1, base + 2});
    }
    return raw;
}

inline RawMesh parse_ply_ascii(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply")
        throw ParseError("PLY: missing magic");

    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> properties;  // list properties stored as "list"
    };
    std::vector<Element> elements;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tag == "element") {
            Element el;
            ls >> el.name >> el.count;
            elements.push_back(el);
        } else if (tag == "property") {
            if (elements.empty()) throw ParseError("PLY: property before element");
            std::string type;
            ls >> type;
            if (type == "list") {
                elements.back().properties.push_back("list");
            } else {
                std::string name;
                ls >> name;
                elements.back().properties.push_back(name);
            }
        } else if (tag == "end_header") {
            break;
        }
    }
    if (!ascii) throw ParseError("PLY: only ascii format is supported");

    RawMesh raw;
    for (const auto& el : elements) {
        if (el.name == "vertex") {
            int ix = -1, iy = -1, iz = -1;
            for (std::size_t p = 0; p < el.properties.size(); ++p) {
                if (el.properties[p] == "x") ix = static_cast<int>(p);
                if (el.properties[p] == "y") iy = static_cast<int>(p);
                if (el.properties[p] == "z") iz = static_cast<int>(p);
            }
            if (ix < 0 || iy < 0 || iz < 0) throw ParseError("PLY: vertex element lacks x/y/z");
            for (std::size_t i = 0; i < el.count; ++i) {
                if (!std::getline(in, line)) throw ParseError("PLY: truncated vertex data");
                std::istringstream ls(line);
                std::vector<double> vals;
                double v;
                while (ls >> v) vals.push_back(v);
                if (static_cast<int>(vals.size()) <= std::max({ix, iy, iz}))
                    throw ParseError("PLY: short vertex record at " + std::to_string(i));
                raw.vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
            }
        } else if (el.name == "face") {
            for (std::size_t i = 0; i < el.count; ++i) {
                if (!std::getline(in, line)) throw ParseError("PLY: truncated face data");
                std::istringstream ls(line);
                int cnt;
                if (!(ls >> cnt) || cnt < 3)
                    throw ParseError("PLY: bad face record at " + std::to_string(i));
                std::vector<int> poly(cnt);
                for (int c = 0; c < cnt; ++c)
                    if (!(ls >> poly[c]))
                        throw ParseError("PLY: short face record at " + std::to_string(i));
                raw.add_face(poly);
            }
        } else {
            for (std::size_t i = 0; i < el.count; ++i)
                if (!std::getline(in, line)) throw ParseError("PLY: truncated element data");
        }
    }
    return raw;
}

inline bool stl_is_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char head[6] = {};
    in.read(head, 5);
    const auto file_size = std::filesystem::file_size(path);
    if (std::strncmp(head, "solid", 5) != 0) return true;
    // Files starting with "solid" can still be binary; trust the size formula.
    if (file_size < 84) return false;
    std::ifstream cnt(path, std::ios::binary);
    cnt.seekg(80);
    std::uint32_t n = 0;
    cnt.read(reinterpret_cast<char*>(&n), 4);
    return file_size == 84 + static_cast<std::uintmax_t>(n) * 50;
}

}  // namespace detail

inline TriangleMesh TriangleMesh::load(const std::string& path, MeshFormat format,
                                       LoadReport* report) {
    if (!std::filesystem::exists(path)) throw IoError("cannot read '" + path + "'");
    if (format == MeshFormat::Auto) format = detail::infer_format(path);

    detail::RawMesh raw;
    if (format == MeshFormat::Obj) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "'");
        raw = detail::parse_obj(in);
    } else if (format == MeshFormat::Stl) {
        if (detail::stl_is_binary(path)) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw IoError("cannot open '" + path + "'");
            raw = detail::parse_stl_binary(in);
        } else {
            std::ifstream in(path);
            if (!in) throw IoError("cannot open '" + path + "'");
            raw = detail::parse_stl_ascii(in);
        }
    } else {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "'");
        raw = detail::parse_ply_ascii(in);
    }
    if (raw.triangles.empty()) throw GeometryError("'" + path + "': zero valid triangles");
    return from_soup(raw.vertices, raw.triangles, report);
}

// ---------------------------------------------------------------------------
// PLY writer with optional per-face colors, extra colored points, and edges
// (used for cluster and coverage visualizations).
// ---------------------------------------------------------------------------

struct Rgb {
    std::uint8_t r = 200, g = 200, b = 200;
};

struct PlyExtras {
    std::vector<Vec3> points;
    std::vector<Rgb> point_colors;
    std::vector<std::pair<int, int>> edges;  // indices into `points`
};

inline void write_ply(const std::string& path, const TriangleMesh& mesh,
                      const std::vector<Rgb>* face_colors = nullptr,
                      const PlyExtras* extras = nullptr) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    const std::size_t extra_pts = extras ? extras->points.size() : 0;
    const std::size_t n_edges = extras ? extras->edges.size() : 0;

    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertex_count() + extra_pts << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.triangle_count() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    if (n_edges > 0) {
        out << "element edge " << n_edges << "\n";
        out << "property int vertex1\nproperty int vertex2\n";
    }
    out << "end_header\n";

    char buf[160];
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f 180 180 180\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (std::size_t i = 0; i < extra_pts; ++i) {
        const Vec3& p = extras->points[i];
        const Rgb c = i < extras->point_colors.size() ? extras->point_colors[i] : Rgb{255, 215, 0};
        std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d %d %d\n", p.x(), p.y(), p.z(),
                      int(c.r), int(c.g), int(c.b));
        out << buf;
    }
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const Rgb c = face_colors && t < face_colors->size() ? (*face_colors)[t] : Rgb{};
        out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << " " << int(c.r) << " "
            << int(c.g) << " " << int(c.b) << "\n";
    }
    const int base = static_cast<int>(mesh.vertex_count());
    for (std::size_t e = 0; e < n_edges; ++e)
        out << base + extras->edges[e].first << " " << base + extras->edges[e].second << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace viewplan

#endif  // VIEWPLAN_MESH_HPP_
