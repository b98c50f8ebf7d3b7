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

#include "viewplan/visibility.hpp"

#include <filesystem>

#include <gtest/gtest.h>

#include "viewplan/synthetic.hpp"

namespace viewplan {
namespace {

// ---------------------------------------------------------------------------
// Test-only oracle: an independent re-derivation of the visibility model
// with its own ray/triangle routine and an all-triangles occlusion loop.
// ---------------------------------------------------------------------------

bool oracle_ray_hits(const Vec3& o, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c,
                     double* t_out) {
    // Plane-then-barycentric formulation (deliberately not Moller-Trumbore).
    const Vec3 n = (b - a).cross(c - a);
    const double denom = n.dot(dir);
    if (std::abs(denom) < 1e-12) return false;
    const double t = n.dot(a - o) / denom;
    if (t <= 1e-6) return false;
    const Vec3 p = o + t * dir;
    // Barycentric membership via signed areas.
    const double area2 = n.norm();
    const double u = (b - a).cross(p - a).dot(n) / (area2 * area2);
    const double v = (c - b).cross(p - b).dot(n) / (area2 * area2);
    const double w = (a - c).cross(p - c).dot(n) / (area2 * area2);
    if (u < -1e-12 || v < -1e-12 || w < -1e-12) return false;
    *t_out = t;
    return true;
}

bool oracle_visible(const Viewpoint& vp, int j, const TriangleMesh& mesh,
                    const CameraModel& cam) {
    const Vec3 p = mesh.centroid(j);
    const double dist = (p - vp.position).norm();
    if (dist <= cam.min_range || dist > cam.fod) return false;
    const Vec3 ray = (p - vp.position) / dist;
    if (angle_between(vp.direction, ray) > deg2rad(cam.fov_deg) / 2.0) return false;
    if (angle_between(mesh.normal(j), vp.position - p) > deg2rad(cam.beta_max_deg)) return false;
    for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
        if (static_cast<int>(k) == j) continue;
        const auto v = mesh.triangle_vertices(k);
        double t;
        if (oracle_ray_hits(vp.position, ray, v[0], v[1], v[2], &t) &&
            t < dist - kOcclusionEpsilon)
            return false;
    }
    return true;
}

TriangleMesh random_soup(Rng& rng, int triangles, double extent) {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
    for (int t = 0; t < triangles; ++t) {
        const Vec3 base(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                        rng.uniform(-extent, extent));
        const int i = static_cast<int>(verts.size());
        verts.push_back(base);
        verts.push_back(base + Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)));
        verts.push_back(base + Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)));
        tris.push_back({i, i + 1, i + 2});
    }
    return TriangleMesh::from_soup(verts, tris);
}

std::vector<Viewpoint> random_viewpoints(Rng& rng, int count, double extent) {
    std::vector<Viewpoint> vps(count);
    for (auto& vp : vps) {
        vp.position = Vec3(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                           rng.uniform(-extent, extent));
        Vec3 dir;
        do {
            dir = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        } while (dir.norm() < 1e-3);
        vp.direction = dir.normalized();
    }
    return vps;
}

TEST(RayTriangle, AxisAlignedHit) {
    const RayHit hit = ray_triangle_intersect({0, 0, 1}, {0, 0, -1}, {-1, -1, 0}, {1, -1, 0},
                                              {0, 1, 0});
    ASSERT_TRUE(hit.hit);
    EXPECT_NEAR(hit.t, 1.0, 1e-12);
}

TEST(RayTriangle, BehindRayMisses) {
    const RayHit hit =
        ray_triangle_intersect({0, 0, 1}, {0, 0, 1}, {-1, -1, 0}, {1, -1, 0}, {0, 1, 0});
    EXPECT_FALSE(hit.hit);
}

TEST(RayTriangle, ParallelRayMisses) {
    const RayHit hit =
        ray_triangle_intersect({0, 0, 1}, {1, 0, 0}, {-1, -1, 0}, {1, -1, 0}, {0, 1, 0});
    EXPECT_FALSE(hit.hit);
}

TEST(RayTriangle, EdgeHitsCount) {
    // Ray through the midpoint of the edge from (-1,-1,0) to (1,-1,0).
    const RayHit hit =
        ray_triangle_intersect({0, -1, 5}, {0, 0, -1}, {-1, -1, 0}, {1, -1, 0}, {0, 1, 0});
    EXPECT_TRUE(hit.hit);
}

TEST(RayTriangle, AgreesWithOracleOnRandomPairs) {
    Rng rng(31);
    int hits = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const Vec3 a(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        const Vec3 b = a + Vec3(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
        const Vec3 c = a + Vec3(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
        const Vec3 o(rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8));
        // Aim roughly at the triangle so the hit branch gets real traffic.
        const Vec3 target = (a + b + c) / 3.0 +
                            Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
        Vec3 dir = target - o;
        if (dir.norm() < 1e-3 || (b - a).cross(c - a).norm() < 1e-6) continue;
        dir.normalize();
        const RayHit hit = ray_triangle_intersect(o, dir, a, b, c);
        double t_oracle;
        const bool oracle = oracle_ray_hits(o, dir, a, b, c, &t_oracle);
        ASSERT_EQ(hit.hit, oracle) << "trial " << trial;
        if (hit.hit) {
            EXPECT_NEAR(hit.t, t_oracle, 1e-8);
            ++hits;
        }
    }
    EXPECT_GT(hits, 100);  // the sample actually exercised the hit path
}

CameraModel wide_camera() {
    CameraModel cam;
    cam.fod = 30.0;
    cam.fov_deg = 80.0;
    cam.beta_max_deg = 75.0;
    return cam;
}

TEST(IsVisible, FloorSeenFromAbove) {
    const TriangleMesh floor = make_plate(4.0, 4.0);
    const Bvh bvh(floor);
    Viewpoint vp;
    vp.position = Vec3(2, 2, 10);
    vp.direction = Vec3(0, 0, -1);
    EXPECT_TRUE(is_visible(vp, 0, floor, wide_camera(), bvh));
    EXPECT_TRUE(is_visible(vp, 1, floor, wide_camera(), bvh));
}

TEST(IsVisible, FieldOfDepthGates) {
    const TriangleMesh floor = make_plate(4.0, 4.0);
    const Bvh bvh(floor);
    Viewpoint vp;
    vp.position = Vec3(2, 2, 35);  // beyond fod = 30
    vp.direction = Vec3(0, 0, -1);
    EXPECT_FALSE(is_visible(vp, 0, floor, wide_camera(), bvh));

    CameraModel near_gated = wide_camera();
    near_gated.min_range = 12.0;
    vp.position = Vec3(2, 2, 10);
    EXPECT_FALSE(is_visible(vp, 0, floor, near_gated, bvh));
}

TEST(IsVisible, OccluderBlocks) {
    // Floor at z=0 plus a parallel occluder at z=5 between eye and floor.
    std::vector<Vec3> verts = {{0, 0, 0},   {4, 0, 0},   {4, 4, 0},  {0, 4, 0},
                               {-5, -5, 5}, {9, -5, 5},  {9, 9, 5},  {-5, 9, 5}};
    std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}, {4, 5, 6}, {4, 6, 7}};
    const TriangleMesh mesh = TriangleMesh::from_soup(verts, tris);
    const Bvh bvh(mesh);
    Viewpoint vp;
    vp.position = Vec3(2, 2, 10);
    vp.direction = Vec3(0, 0, -1);
    EXPECT_FALSE(is_visible(vp, 0, mesh, wide_camera(), bvh));  // floor blocked
    EXPECT_TRUE(is_visible(vp, 2, mesh, wide_camera(), bvh));   // occluder itself visible
    EXPECT_EQ(oracle_visible(vp, 0, mesh, wide_camera()), false);
}

TEST(IsVisible, IncidenceAngleGates) {
    const TriangleMesh floor = make_plate(4.0, 4.0);
    const Bvh bvh(floor);
    Viewpoint vp;
    vp.position = floor.centroid(0) + Vec3(5, 0, 5);  // 45 degrees off the +z normal
    vp.direction = (floor.centroid(0) - vp.position).normalized();
    CameraModel cam = wide_camera();  // beta_max 75: pass
    EXPECT_TRUE(is_visible(vp, 0, floor, cam, bvh));
    cam.beta_max_deg = 30.0;  // tighter than 45: fail
    EXPECT_FALSE(is_visible(vp, 0, floor, cam, bvh));
}

TEST(VisibilityMatrixOp, FacingAwayGivesZeroRow) {
    const TriangleMesh floor = make_plate(4.0, 4.0);
    std::vector<Viewpoint> vps(2);
    vps[0].position = Vec3(2, 2, 10);
    vps[0].direction = Vec3(0, 0, -1);
    vps[1].position = Vec3(2, 2, 10);
    vps[1].direction = Vec3(0, 0, 1);  // reversed
    const VisibilityMatrix m = visibility_matrix(vps, floor, wide_camera());
    EXPECT_TRUE(m.bit(0, 0));
    EXPECT_TRUE(m.bit(0, 1));
    EXPECT_FALSE(m.bit(1, 0));
    EXPECT_FALSE(m.bit(1, 1));
}

TEST(VisibilityMatrixOp, CubeFaceViewpointsSeeOnlyTheirFace) {
    const TriangleMesh cube = make_cube(2.0, Vec3(-1, -1, -1));  // centered at origin
    CameraModel cam = wide_camera();
    cam.fod = 10.0;
    std::vector<Viewpoint> vps;
    for (int axis = 0; axis < 3; ++axis)
        for (int sign : {-1, 1}) {
            Viewpoint vp;
            vp.position = Vec3::Zero();
            vp.position[axis] = sign * 5.0;
            vp.direction = -vp.position.normalized();
            vps.push_back(vp);
        }
    const VisibilityMatrix m = visibility_matrix(vps, cube, cam);
    for (std::size_t i = 0; i < vps.size(); ++i) {
        std::size_t seen = 0;
        for (std::size_t j = 0; j < cube.triangle_count(); ++j) {
            if (!m.bit(i, j)) continue;
            ++seen;
            // A visible triangle's outward normal must face the viewpoint.
            EXPECT_GT(cube.normal(j).dot(vps[i].position - cube.centroid(j)), 0.0);
        }
        EXPECT_EQ(seen, 2u);  // exactly its own face pair
    }
    // Full brute-force agreement on the same scene.
    for (std::size_t i = 0; i < vps.size(); ++i)
        for (std::size_t j = 0; j < cube.triangle_count(); ++j)
            EXPECT_EQ(m.bit(i, j), oracle_visible(vps[i], static_cast<int>(j), cube, cam));
}

TEST(VisibilityMatrixOp, BvhMatchesOracleOnRandomScenes) {
    Rng rng(77);
    for (int scene = 0; scene < 10; ++scene) {
        const TriangleMesh mesh = random_soup(rng, 60, 10.0);
        const auto vps = random_viewpoints(rng, 8, 14.0);
        CameraModel cam;
        cam.fod = rng.uniform(10.0, 40.0);
        cam.fov_deg = rng.uniform(40.0, 120.0);
        cam.beta_max_deg = rng.uniform(30.0, 90.0);
        const VisibilityMatrix m = visibility_matrix(vps, mesh, cam);
        for (std::size_t i = 0; i < vps.size(); ++i)
            for (std::size_t j = 0; j < mesh.triangle_count(); ++j)
                ASSERT_EQ(m.bit(i, j), oracle_visible(vps[i], static_cast<int>(j), mesh, cam))
                    << "scene " << scene << " pair (" << i << "," << j << ")";
    }
}

TEST(VisibilityMatrixOp, ThreadCountDoesNotChangeBits) {
    Rng rng(78);
    const TriangleMesh mesh = random_soup(rng, 80, 10.0);
    const auto vps = random_viewpoints(rng, 9, 14.0);
    const CameraModel cam = wide_camera();
    const VisibilityMatrix serial = visibility_matrix(vps, mesh, cam, 1);
    const VisibilityMatrix parallel = visibility_matrix(vps, mesh, cam, 4);
    EXPECT_TRUE(serial == parallel);
}

TEST(VisibilityMatrixOp, FodMonotonicity) {
    Rng rng(79);
    const TriangleMesh mesh = random_soup(rng, 40, 8.0);
    const auto vps = random_viewpoints(rng, 6, 12.0);
    CameraModel small = wide_camera();
    small.fod = 15.0;
    CameraModel large = wide_camera();
    large.fod = 45.0;
    const VisibilityMatrix a = visibility_matrix(vps, mesh, small);
    const VisibilityMatrix b = visibility_matrix(vps, mesh, large);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a.bit(i, j)) EXPECT_TRUE(b.bit(i, j));
}

TEST(VisibilityMatrixOp, StrictVerticesIsMoreConservative) {
    // Occluder covers part of the floor triangle: centroid unblocked but the
    // corner vertex at the origin blocked.
    std::vector<Vec3> verts = {{0, 0, 0},  {8, 0, 0},  {0, 8, 0},
                               {-6, -6, 4}, {8, -6, 4}, {-6, 8, 4}};
    const TriangleMesh mesh =
        TriangleMesh::from_soup(verts, {{{0, 1, 2}}, {{3, 4, 5}}});
    const Bvh bvh(mesh);
    Viewpoint vp;
    vp.position = Vec3(0, 0, 12);
    vp.direction = Vec3(0.2, 0.2, -1).normalized();
    CameraModel cam = wide_camera();
    ASSERT_TRUE(is_visible(vp, 0, mesh, cam, bvh));
    cam.strict_vertices = true;
    EXPECT_FALSE(is_visible(vp, 0, mesh, cam, bvh));
}

TEST(CoverageStatsOp, HandTraces) {
    VisibilityMatrix identity(3, 3);
    for (int i = 0; i < 3; ++i) identity.set_bit(i, i);
    CoverageStats s = coverage_stats(identity, {1, 1, 1});
    EXPECT_EQ(s.counts, (std::vector<int>{1, 1, 1}));
    EXPECT_EQ(s.n_cover, 3u);

    s = coverage_stats(identity, {0, 0, 0});
    EXPECT_EQ(s.counts, (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(s.n_cover, 0u);

    VisibilityMatrix a(2, 3);
    a.set_bit(0, 0);
    a.set_bit(0, 1);
    a.set_bit(1, 1);
    a.set_bit(1, 2);
    s = coverage_stats(a, {1, 1});
    EXPECT_EQ(s.counts, (std::vector<int>{1, 2, 1}));
    EXPECT_EQ(s.n_cover, 3u);
    EXPECT_THROW(coverage_stats(a, {1, 1, 1}), GeometryError);

    // n_cover is bounded by the total count and the column count.
    std::size_t sum_c = 0;
    for (int c : s.counts) sum_c += c;
    EXPECT_LE(s.n_cover, sum_c);
    EXPECT_LE(s.n_cover, a.cols());
}

TEST(BitMatrixIo, RoundTripAndValidation) {
    Rng rng(555);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t rows = 1 + rng.next_below(6);
        const std::size_t cols = 1 + rng.next_below(130);
        BitMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (rng.bernoulli(0.3)) m.set_bit(r, c);
        const std::string path =
            (std::filesystem::path(::testing::TempDir()) / "matrix.bits").string();
        m.write(path);
        EXPECT_TRUE(BitMatrix::read(path) == m);
    }

    const std::string bad =
        (std::filesystem::path(::testing::TempDir()) / "bad.bits").string();
    {
        std::ofstream out(bad);
        out << "1 3\nF\n";  // padding bit set within the last nibble
    }
    EXPECT_THROW(BitMatrix::read(bad), ParseError);
}

TEST(SelfVisibility, GeneratedViewpointSeesItsCluster) {
    // Regression guard tying viewgen to visibility: a viewpoint offset by
    // 0.95 * fod from a flat cluster sees the cluster's seed triangle.
    const TriangleMesh plate = make_plate(6.0, 6.0).subdivided(2.0);
    std::vector<int> members(plate.triangle_count());
    std::iota(members.begin(), members.end(), 0);
    const ClusterFrame frame = cluster_center_and_normal(plate, members);
    const CameraModel cam = wide_camera();
    const Viewpoint vp =
        generate_viewpoint(frame.center, frame.resultant, 0.95 * cam.fod, 0);
    const Bvh bvh(plate);
    bool sees_any = false;
    for (std::size_t j = 0; j < plate.triangle_count(); ++j)
        sees_any = sees_any || is_visible(vp, static_cast<int>(j), plate, cam, bvh);
    EXPECT_TRUE(sees_any);
    // The seed triangle nearest the cluster center is visible.
    std::size_t seed = 0;
    double best = std::numeric_limits<double>::max();
    for (std::size_t j = 0; j < plate.triangle_count(); ++j) {
        const double d = (plate.centroid(j) - frame.center).norm();
        if (d < best) {
            best = d;
            seed = j;
        }
    }
    EXPECT_TRUE(is_visible(vp, static_cast<int>(seed), plate, cam, bvh));
}

}  // namespace
}  // namespace viewplan
