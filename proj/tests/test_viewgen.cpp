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

#include "viewplan/viewgen.hpp"

#include <gtest/gtest.h>

#include "viewplan/synthetic.hpp"

namespace viewplan {
namespace {

TriangleMesh single_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    return TriangleMesh::from_soup({a, b, c}, {{{0, 1, 2}}});
}

TEST(ClusterFrameOp, SingletonCluster) {
    const TriangleMesh mesh = single_triangle({0, 0, 0}, {3, 0, 0}, {0, 3, 0});
    const ClusterFrame frame = cluster_center_and_normal(mesh, {0});
    EXPECT_LT((frame.center - Vec3(1, 1, 0)).norm(), 1e-12);
    EXPECT_LT((frame.resultant - Vec3(0, 0, 1)).norm(), 1e-12);
    EXPECT_FALSE(frame.degenerate);
}

TEST(ClusterFrameOp, MeanOfUnitNormals) {
    // One +z triangle and one +y triangle.
    const TriangleMesh mesh = TriangleMesh::from_soup(
        {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 2}, {1, 0, 1}},
        {{{0, 1, 2}}, {{3, 4, 5}}});
    ASSERT_LT((mesh.normal(1) - Vec3(0, 1, 0)).norm(), 1e-12);
    const ClusterFrame frame = cluster_center_and_normal(mesh, {0, 1});
    EXPECT_LT((frame.resultant - Vec3(0, 0.5, 0.5)).norm(), 1e-12);
}

TEST(ClusterFrameOp, OppositeNormalsCancel) {
    const TriangleMesh mesh = TriangleMesh::from_soup(
        {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 5}, {0, 1, 5}, {1, 0, 5}},
        {{{0, 1, 2}}, {{3, 4, 5}}});
    ASSERT_LT((mesh.normal(0) + mesh.normal(1)).norm(), 1e-12);
    const ClusterFrame frame = cluster_center_and_normal(mesh, {0, 1});
    EXPECT_LT(frame.resultant.norm(), 1e-12);
    EXPECT_TRUE(frame.degenerate);
    EXPECT_THROW(cluster_center_and_normal(mesh, {}), GeometryError);
}

TEST(GenerateViewpoint, AxisCase) {
    const Viewpoint vp = generate_viewpoint({0, 0, 0}, {0, 0, 2}, 10.0);
    EXPECT_LT((vp.position - Vec3(0, 0, 10)).norm(), 1e-12);
    EXPECT_LT((vp.direction - Vec3(0, 0, -1)).norm(), 1e-12);
}

TEST(GenerateViewpoint, OffsetIsTrueMetricDistance) {
    // 0.95 * 30 m field of depth.
    const Viewpoint vp = generate_viewpoint({1, 1, 1}, {1, 0, 0}, 28.5, 3);
    EXPECT_LT((vp.position - Vec3(29.5, 1, 1)).norm(), 1e-12);
    EXPECT_EQ(vp.source_cluster, 3);
}

TEST(GenerateViewpoint, DirectionAntiParallelToOffset) {
    Rng rng(9);
    for (int trial = 0; trial < 25; ++trial) {
        const Vec3 c(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
        Vec3 n(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        if (n.norm() < 1e-3) continue;
        const double d = rng.uniform(0.5, 40.0);
        const Viewpoint vp = generate_viewpoint(c, n, d);
        EXPECT_NEAR(vp.direction.norm(), 1.0, 1e-9);
        EXPECT_NEAR((vp.position - c).norm(), d, 1e-9);
        EXPECT_NEAR(vp.direction.dot(vp.position - c), -(vp.position - c).norm(), 1e-9);
    }
    EXPECT_THROW(generate_viewpoint({0, 0, 0}, {0, 0, 0}, 10.0), GeometryError);
    EXPECT_THROW(generate_viewpoint({0, 0, 0}, {0, 0, 1}, 0.0), GeometryError);
}

TEST(RepulsionOp, NoViolationReturnsEmpty) {
    const TriangleMesh mesh = make_plate(2.0, 2.0);
    const FieldResult r = repulsion_correction({1, 1, 20}, mesh, 5.0);
    EXPECT_FALSE(r.direction.has_value());
    EXPECT_FALSE(r.cancelled);
}

TEST(RepulsionOp, SingleRepulsorPushesStraightUp) {
    const TriangleMesh mesh = single_triangle({-1, -1, 0}, {1, -1, 0}, {0, 2, 0});
    const Vec3 centroid = mesh.centroid(0);
    const FieldResult r =
        repulsion_correction(centroid + Vec3(0, 0, 1.0), mesh, 5.0);
    ASSERT_TRUE(r.direction.has_value());
    EXPECT_LT((*r.direction - Vec3(0, 0, 1)).norm(), 1e-12);
    EXPECT_NEAR(r.direction->norm(), 1.0, 1e-9);
}

TEST(RepulsionOp, SymmetricCancellation) {
    // Two violating centroids at +x and -x of the probe point.
    const TriangleMesh mesh = TriangleMesh::from_soup(
        {{2, -1, 0}, {4, 1, 0}, {2, 1, 0}, {-2, -1, 0}, {-2, 1, 0}, {-4, 1, 0}},
        {{{0, 1, 2}}, {{3, 4, 5}}});
    const Vec3 mid = 0.5 * (mesh.centroid(0) + mesh.centroid(1));
    const FieldResult r = repulsion_correction(mid, mesh, 50.0);
    EXPECT_TRUE(r.cancelled);
    EXPECT_FALSE(r.direction.has_value());
}

TEST(AltitudeOp, BelowAtAndAboveLimit) {
    const auto below = altitude_correction({5, 5, 1}, 3.0);
    ASSERT_TRUE(below.has_value());
    EXPECT_LT((*below - Vec3(0, 0, 1)).norm(), 1e-12);

    EXPECT_FALSE(altitude_correction({5, 5, 4}, 3.0).has_value());
    // Strict inequality: exactly at the limit is compliant.
    EXPECT_FALSE(altitude_correction({5, 5, 3.0}, 3.0).has_value());
}

TEST(CorrectViewpoint, FeasibleInputUntouched) {
    const TriangleMesh plate = make_plate(10.0, 10.0);
    ConstraintSpace cs;
    cs.d_safe = 5.0;
    cs.h_limit_z = 0.0;
    const Viewpoint vp = generate_viewpoint({5, 5, 0}, {0, 0, 1}, 28.5);
    const CorrectionResult r = correct_viewpoint(vp, {5, 5, 0}, {0, 0, 1}, 28.5, plate, cs);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.field_iterations, 0);
    EXPECT_EQ(r.retreats, 0);
    EXPECT_LT((r.viewpoint.position - vp.position).norm(), 1e-12);
}

TEST(CorrectViewpoint, LiftsViewpointOffRoof) {
    const TriangleMesh roof = make_plate(20.0, 20.0).subdivided(2.0);
    ConstraintSpace cs;
    cs.d_safe = 5.0;
    cs.h_limit_z = 0.0;
    Viewpoint vp;
    vp.position = Vec3(10, 10, 1.0);  // 1 m above the roof plane
    vp.direction = Vec3(0, 0, -1);
    const CorrectionResult r =
        correct_viewpoint(vp, {10, 10, 0}, {0, 0, 1}, 28.5, roof, cs);
    ASSERT_TRUE(r.feasible);
    EXPECT_GE(min_clearance(r.viewpoint.position, roof), cs.d_safe);
    // Direction is re-aimed at the cluster center.
    const Vec3 want = (Vec3(10, 10, 0) - r.viewpoint.position).normalized();
    EXPECT_LT((r.viewpoint.direction - want).norm(), 1e-9);
}

TEST(CorrectViewpoint, EnforcesHeightLimit) {
    const TriangleMesh wall = single_triangle({0, 0, 0}, {0, 4, 0}, {0, 0, 4});
    ConstraintSpace cs;
    cs.d_safe = 1.0;
    cs.h_limit_z = 2.0;
    Viewpoint vp;
    vp.position = Vec3(10, 1, -5);  // below ground
    vp.direction = Vec3(-1, 0, 0);
    const CorrectionResult r =
        correct_viewpoint(vp, Vec3(0, 4.0 / 3, 4.0 / 3), {1, 0, 0}, 10.0, wall, cs);
    ASSERT_TRUE(r.feasible);
    EXPECT_GE(r.viewpoint.position.z(), cs.h_limit_z);
}

TEST(CorrectViewpoint, CancelledFieldFallsBackToRetreat) {
    // Two parallel triangles 1 m apart with a clearance requirement of 6 m.
    // The raw viewpoint lands exactly between their centroids, where the two
    // repulsions cancel; after one retreat the field walks the candidate out
    // past the near wall.
    const TriangleMesh mesh = TriangleMesh::from_soup(
        {{0, -1, -1}, {0, 1, 0}, {0, -1, 1}, {1, -1, -1}, {1, -1, 1}, {1, 1, 0}},
        {{{0, 1, 2}}, {{3, 4, 5}}});
    const Vec3 c0 = mesh.centroid(0);
    const Vec3 c1 = mesh.centroid(1);
    ASSERT_LT(((c0 + c1) / 2.0 - (c0 + Vec3(0.5, 0, 0))).norm(), 1e-12);

    ConstraintSpace cs;
    cs.d_safe = 6.0;
    cs.h_limit_z = -100.0;
    const double d = 0.5;  // offset lands at the midpoint of the two centroids
    const FieldResult at_start =
        repulsion_correction(c0 + Vec3(d, 0, 0), mesh, cs.d_safe);
    ASSERT_TRUE(at_start.cancelled);

    const Viewpoint vp = generate_viewpoint(c0, {1, 0, 0}, d);
    const CorrectionResult r = correct_viewpoint(vp, c0, {1, 0, 0}, d, mesh, cs);
    ASSERT_TRUE(r.feasible);
    EXPECT_GE(r.retreats, 1);
    EXPECT_GE(min_clearance(r.viewpoint.position, mesh), cs.d_safe);
    // Re-aimed at the cluster center after correction.
    const Vec3 want = (c0 - r.viewpoint.position).normalized();
    EXPECT_LT((r.viewpoint.direction - want).norm(), 1e-9);
}

TEST(CorrectViewpoint, ExhaustsRetreatsAndReportsInfeasible) {
    // Unreachable height limit: phase 1 cannot climb far enough and every
    // retreat only moves the candidate closer to the surface.
    const TriangleMesh plate = make_plate(4.0, 4.0);
    ConstraintSpace cs;
    cs.d_safe = 1.0;
    cs.h_limit_z = 500.0;
    cs.max_correction_iters = 5;
    const Viewpoint vp = generate_viewpoint({2, 2, 0}, {0, 0, 1}, 10.0);
    const CorrectionResult r = correct_viewpoint(vp, {2, 2, 0}, {0, 0, 1}, 10.0, plate, cs);
    EXPECT_FALSE(r.feasible);
    EXPECT_GE(r.retreats, 1);
}

TEST(Clearance, ExactModeSeesTriangleInterior) {
    // Large triangle: its centroid is far from a probe point hovering above
    // one corner, but the surface itself is close.
    const TriangleMesh mesh = single_triangle({0, 0, 0}, {40, 0, 0}, {0, 40, 0});
    const Vec3 probe(1, 1, 1);
    const double centroid_based = min_clearance(probe, mesh, false);
    const double exact = min_clearance(probe, mesh, true);
    EXPECT_GT(centroid_based, 15.0);
    EXPECT_NEAR(exact, 1.0, 1e-9);

    ConstraintSpace strict;
    strict.d_safe = 5.0;
    strict.h_limit_z = -10.0;
    strict.exact_clearance = true;
    EXPECT_FALSE(satisfies_constraints(probe, mesh, strict));
    strict.exact_clearance = false;
    EXPECT_TRUE(satisfies_constraints(probe, mesh, strict));
}

}  // namespace
}  // namespace viewplan
