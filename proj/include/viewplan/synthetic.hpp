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

#ifndef VIEWPLAN_SYNTHETIC_HPP_
#define VIEWPLAN_SYNTHETIC_HPP_

#include <vector>

#include "viewplan/mesh.hpp"

namespace viewplan {

// Synthetic building-scale geometry used by the test suites, the benchmark
// harness and the README walkthrough. All shapes use outward normals
// (counter-clockwise winding seen from outside); the building shapes are
// open underneath, like any drone-scanned structure.

namespace synth {

struct Builder {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    int add(const Vec3& v) {
        vertices.push_back(v);
        return static_cast<int>(vertices.size()) - 1;
    }
    void tri(int a, int b, int c) { triangles.push_back({a, b, c}); }
    /// Quad (a,b,c,d) counter-clockwise seen from the outward side.
    void quad(int a, int b, int c, int d) {
        tri(a, b, c);
        tri(a, c, d);
    }
    TriangleMesh mesh() const { return TriangleMesh::from_soup(vertices, triangles); }
};

}  // namespace synth

/// Flat rectangular plate in the z = 0 plane, normals +z.
inline TriangleMesh make_plate(double width, double depth) {
    synth::Builder b;
    const int v0 = b.add({0, 0, 0});
    const int v1 = b.add({width, 0, 0});
    const int v2 = b.add({width, depth, 0});
    const int v3 = b.add({0, depth, 0});
    b.quad(v0, v1, v2, v3);
    return b.mesh();
}

/// Closed axis-aligned cube with edge `size`, min corner at `origin`.
inline TriangleMesh make_cube(double size, const Vec3& origin = Vec3::Zero()) {
    synth::Builder b;
    int c[8];
    for (int i = 0; i < 8; ++i)
        c[i] = b.add(origin + size * Vec3(i & 1 ? 1 : 0, i & 2 ? 1 : 0, i & 4 ? 1 : 0));
    b.quad(c[0], c[2], c[3], c[1]);  // bottom (-z)
    b.quad(c[4], c[5], c[7], c[6]);  // top (+z)
    b.quad(c[0], c[1], c[5], c[4]);  // front (-y)
    b.quad(c[2], c[6], c[7], c[3]);  // back (+y)
    b.quad(c[0], c[4], c[6], c[2]);  // left (-x)
    b.quad(c[1], c[3], c[7], c[5]);  // right (+x)
    return b.mesh();
}

/// Cube without its top face; interior faces are not modeled.
inline TriangleMesh make_open_box(double size, const Vec3& origin = Vec3::Zero()) {
    synth::Builder b;
    int c[8];
    for (int i = 0; i < 8; ++i)
        c[i] = b.add(origin + size * Vec3(i & 1 ? 1 : 0, i & 2 ? 1 : 0, i & 4 ? 1 : 0));
    b.quad(c[0], c[2], c[3], c[1]);
    b.quad(c[0], c[1], c[5], c[4]);
    b.quad(c[2], c[6], c[7], c[3]);
    b.quad(c[0], c[4], c[6], c[2]);
    b.quad(c[1], c[3], c[7], c[5]);
    return b.mesh();
}

/// Gabled house: rectangular walls, pentagonal ends, two roof planes.
/// Footprint width x depth on the ground plane, ridge along y.
inline TriangleMesh make_house(double width = 20.0, double depth = 12.0, double wall_h = 6.0,
                               double ridge_h = 9.0) {
    synth::Builder b;
    const int p0 = b.add({0, 0, 0});
    const int p1 = b.add({width, 0, 0});
    const int p2 = b.add({width, depth, 0});
    const int p3 = b.add({0, depth, 0});
    const int q0 = b.add({0, 0, wall_h});
    const int q1 = b.add({width, 0, wall_h});
    const int q2 = b.add({width, depth, wall_h});
    const int q3 = b.add({0, depth, wall_h});
    const int r0 = b.add({width / 2, 0, ridge_h});      // front ridge end
    const int r1 = b.add({width / 2, depth, ridge_h});  // back ridge end

    b.quad(p0, p1, q1, q0);  // front wall (-y)
    b.quad(p2, p3, q3, q2);  // back wall (+y)
    b.quad(p3, p0, q0, q3);  // left wall (-x)
    b.quad(p1, p2, q2, q1);  // right wall (+x)
    b.tri(q0, q1, r0);       // front gable
    b.tri(q2, q3, r1);       // back gable
    b.quad(q0, r0, r1, q3);  // left roof plane
    b.quad(r0, q1, q2, r1);  // right roof plane
    return b.mesh();
}

/// L-shaped tower: an L footprint extruded to `height` with a flat roof.
/// The outer corner of the L sits at the origin; `arm` is the full square
/// side and `notch` the cut-out square side.
inline TriangleMesh make_l_tower(double arm = 12.0, double notch = 6.0, double height = 20.0) {
    synth::Builder b;
    // Footprint polygon, counter-clockwise seen from above.
    const Vec3 fp[6] = {
        {0, 0, 0},           {arm, 0, 0},   {arm, arm - notch, 0},
        {arm - notch, arm - notch, 0},      {arm - notch, arm, 0}, {0, arm, 0},
    };
    int lo[6], hi[6];
    for (int i = 0; i < 6; ++i) lo[i] = b.add(fp[i]);
    for (int i = 0; i < 6; ++i) hi[i] = b.add(fp[i] + Vec3(0, 0, height));
    for (int i = 0; i < 6; ++i) {
        const int j = (i + 1) % 6;
        b.quad(lo[i], lo[j], hi[j], hi[i]);  // wall strip, outward normal
    }
    // Roof: fan split of the L into two convex quads.
    b.quad(hi[0], hi[1], hi[2], hi[3]);
    b.quad(hi[0], hi[3], hi[4], hi[5]);
    return b.mesh();
}

/// Closed outer cube with a small sealed inner chamber whose faces look into
/// the chamber. No viewpoint outside can see the chamber walls, and any
/// clearance constraint larger than the chamber keeps viewpoints out of it:
/// the chamber triangles are uncoverable by construction.
inline TriangleMesh make_cavity_box(double outer = 10.0, double inner = 2.0) {
    synth::Builder b;
    int c[8];
    for (int i = 0; i < 8; ++i)
        c[i] = b.add(outer * Vec3(i & 1 ? 1 : 0, i & 2 ? 1 : 0, i & 4 ? 1 : 0));
    b.quad(c[0], c[2], c[3], c[1]);
    b.quad(c[4], c[5], c[7], c[6]);
    b.quad(c[0], c[1], c[5], c[4]);
    b.quad(c[2], c[6], c[7], c[3]);
    b.quad(c[0], c[4], c[6], c[2]);
    b.quad(c[1], c[3], c[7], c[5]);
    const Vec3 origin = Vec3::Constant((outer - inner) / 2.0);
    int d[8];
    for (int i = 0; i < 8; ++i)
        d[i] = b.add(origin + inner * Vec3(i & 1 ? 1 : 0, i & 2 ? 1 : 0, i & 4 ? 1 : 0));
    // Reversed winding: normals point into the chamber.
    b.quad(d[1], d[3], d[2], d[0]);
    b.quad(d[6], d[7], d[5], d[4]);
    b.quad(d[4], d[5], d[1], d[0]);
    b.quad(d[3], d[7], d[6], d[2]);
    b.quad(d[2], d[6], d[4], d[0]);
    b.quad(d[5], d[7], d[3], d[1]);
    return b.mesh();
}

}  // namespace viewplan

#endif  // VIEWPLAN_SYNTHETIC_HPP_
