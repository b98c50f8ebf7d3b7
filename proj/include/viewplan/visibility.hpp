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

#ifndef VIEWPLAN_VISIBILITY_HPP_
#define VIEWPLAN_VISIBILITY_HPP_

#include <cmath>
#include <thread>
#include <vector>

#include "viewplan/bitmatrix.hpp"
#include "viewplan/mesh.hpp"
#include "viewplan/viewgen.hpp"

namespace viewplan {

/// Minimum ray parameter for a hit; guards self-intersection at the origin.
constexpr double kRayEpsilon = 1e-6;
/// Slack subtracted from the target distance in occlusion tests; guards
/// shared-edge false positives between welded neighbors.
constexpr double kOcclusionEpsilon = 1e-4;
/// Determinants below this are treated as ray-parallel-to-plane.
constexpr double kParallelEpsilon = 1e-12;

struct CameraModel {
    double fod = 30.0;         // field of depth: maximum viewing distance, meters
    double fov_deg = 80.0;     // full cone angle, degrees
    double beta_max_deg = 75.0;  // max incidence angle at the surface, degrees
    double min_range = 0.0;    // near clip, meters
    bool strict_vertices = false;  // also require the three vertices to pass

    void validate() const {
        if (!(fod > min_range && min_range >= 0.0))
            throw ConfigError("camera: need fod > min_range >= 0");
        if (!(fov_deg > 0.0 && fov_deg < 180.0))
            throw ConfigError("camera: fov must be in (0, 180) degrees");
        if (!(beta_max_deg > 0.0 && beta_max_deg <= 90.0))
            throw ConfigError("camera: beta_max must be in (0, 90] degrees");
    }
    double cos_half_fov() const { return std::cos(deg2rad(fov_deg) / 2.0); }
    double cos_beta_max() const { return std::cos(deg2rad(beta_max_deg)); }
};

using VisibilityMatrix = BitMatrix;

struct RayHit {
    bool hit = false;
    double t = 0.0;
};

/// Moller-Trumbore ray/triangle intersection. Hits on edges count; hits at
/// t <= eps_ray do not.
inline RayHit ray_triangle_intersect(const Vec3& origin, const Vec3& dir, const Vec3& v0,
                                     const Vec3& v1, const Vec3& v2,
                                     double eps_ray = kRayEpsilon) {
    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < kParallelEpsilon) return {};
    const double inv_det = 1.0 / det;
    const Vec3 tvec = origin - v0;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return {};
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return {};
    const double t = e2.dot(qvec) * inv_det;
    if (t <= eps_ray) return {};
    return {true, t};
}

// ---------------------------------------------------------------------------
// Bounding volume hierarchy for occlusion queries.
//
// Median split on the longest centroid axis; leaves hold a few triangles.
// The tree is immutable after build and shared read-only across threads.
// ---------------------------------------------------------------------------

class Bvh {
public:
    Bvh() = default;

    explicit Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
        const std::size_t n = mesh.triangle_count();
        order_.resize(n);
        for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<int>(i);
        nodes_.reserve(2 * n);
        build_node(0, static_cast<int>(n));
    }

    /// True if any triangle other than `exclude` intersects the ray strictly
    /// before t_max.
    bool any_hit_before(const Vec3& origin, const Vec3& dir, double t_max, int exclude) const {
        if (nodes_.empty()) return false;
        const Vec3 inv_dir(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
        int stack[64];
        int top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes_[stack[--top]];
            if (!node.box.intersects_ray(origin, inv_dir, t_max)) continue;
            if (node.count > 0) {
                for (int i = node.start; i < node.start + node.count; ++i) {
                    const int tri = order_[i];
                    if (tri == exclude) continue;
                    const auto v = mesh_->triangle_vertices(tri);
                    const RayHit hit = ray_triangle_intersect(origin, dir, v[0], v[1], v[2]);
                    if (hit.hit && hit.t < t_max) return true;
                }
            } else {
                stack[top++] = node.right;
                stack[top++] = node.left;
            }
        }
        return false;
    }

private:
    struct Node {
        Aabb box;
        int left = -1, right = -1;
        int start = 0, count = 0;  // count > 0 marks a leaf
    };

    static constexpr int kLeafSize = 4;

    int build_node(int begin, int end) {
        Node node;
        Aabb centroid_box;
        for (int i = begin; i < end; ++i) {
            const auto v = mesh_->triangle_vertices(order_[i]);
            node.box.extend(v[0]);
            node.box.extend(v[1]);
            node.box.extend(v[2]);
            centroid_box.extend(mesh_->centroid(order_[i]));
        }
        const int index = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        if (end - begin <= kLeafSize) {
            nodes_[index].start = begin;
            nodes_[index].count = end - begin;
            return index;
        }
        int axis = 0;
        centroid_box.extent().maxCoeff(&axis);
        const int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) {
                             return mesh_->centroid(a)[axis] < mesh_->centroid(b)[axis];
                         });
        const int left = build_node(begin, mid);
        const int right = build_node(mid, end);
        nodes_[index].left = left;
        nodes_[index].right = right;
        return index;
    }

    const TriangleMesh* mesh_ = nullptr;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

namespace detail {

/// Conditions 1, 2 and 4 evaluated at a single surface sample point.
inline bool sample_visible(const Vec3& eye, const Vec3& view_dir, const Vec3& sample,
                           int target_tri, const CameraModel& cam, const Bvh& bvh) {
    const Vec3 to_sample = sample - eye;
    const double dist = to_sample.norm();
    if (dist <= cam.min_range || dist > cam.fod) return false;
    if (dist < kRayEpsilon) return false;
    const Vec3 ray = to_sample / dist;
    if (view_dir.dot(ray) < cam.cos_half_fov()) return false;
    return !bvh.any_hit_before(eye, ray, dist - kOcclusionEpsilon, target_tri);
}

}  // namespace detail

/// Four-condition visibility test for one (viewpoint, triangle) pair:
/// range gate, view cone, incidence angle, occlusion. Evaluated at the
/// triangle centroid; in strict mode the three vertices must pass the
/// range/cone/occlusion conditions as well.
inline bool is_visible(const Viewpoint& vp, int tri, const TriangleMesh& mesh,
                       const CameraModel& cam, const Bvh& bvh) {
    const Vec3& p = mesh.centroid(tri);
    // Incidence: angle between the surface normal and the ray back to the eye.
    const Vec3 to_eye = vp.position - p;
    const double dist = to_eye.norm();
    if (dist < kRayEpsilon) return false;
    if (mesh.normal(tri).dot(to_eye / dist) < cam.cos_beta_max()) return false;
    if (!detail::sample_visible(vp.position, vp.direction, p, tri, cam, bvh)) return false;
    if (cam.strict_vertices) {
        for (const Vec3& v : mesh.triangle_vertices(tri))
            if (!detail::sample_visible(vp.position, vp.direction, v, tri, cam, bvh))
                return false;
    }
    return true;
}

/// Fills rows [first_row, first_row + vps.size()) of `matrix`. Rows are
/// independent, so the work is split across `threads`; output bits do not
/// depend on the thread count.
inline void fill_visibility_rows(VisibilityMatrix& matrix, std::size_t first_row,
                                 const std::vector<Viewpoint>& vps, const TriangleMesh& mesh,
                                 const CameraModel& cam, const Bvh& bvh, int threads = 1) {
    cam.validate();
    const std::size_t m = vps.size();
    const std::size_t n = mesh.triangle_count();
    auto fill_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j)
            if (is_visible(vps[i], static_cast<int>(j), mesh, cam, bvh))
                matrix.set_bit(first_row + i, j);
    };
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || m < 2) {
        for (std::size_t i = 0; i < m; ++i) fill_row(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t want = std::min<std::size_t>(threads, m);
    for (std::size_t w = 0; w < want; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < m; i += want) fill_row(i);
        });
    for (auto& th : pool) th.join();
}

inline VisibilityMatrix visibility_matrix(const std::vector<Viewpoint>& vps,
                                          const TriangleMesh& mesh, const CameraModel& cam,
                                          int threads = 1) {
    if (vps.empty() || mesh.empty())
        throw GeometryError("visibility_matrix: need at least one viewpoint and one triangle");
    const Bvh bvh(mesh);
    VisibilityMatrix matrix(vps.size(), mesh.triangle_count());
    fill_visibility_rows(matrix, 0, vps, mesh, cam, bvh, threads);
    return matrix;
}

// ---------------------------------------------------------------------------
// Coverage counters for a selection vector.
// ---------------------------------------------------------------------------

struct CoverageStats {
    std::vector<int> counts;  // per-triangle cover count c_j
    std::size_t n_cover = 0;  // triangles with c_j >= 1
};

inline CoverageStats coverage_stats(const VisibilityMatrix& a,
                                    const std::vector<std::uint8_t>& selection) {
    if (selection.size() != a.rows())
        throw GeometryError("coverage_stats: selection length does not match matrix rows");
    CoverageStats stats;
    stats.counts.assign(a.cols(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (!selection[i]) continue;
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a.bit(i, j)) ++stats.counts[j];
    }
    for (int c : stats.counts)
        if (c >= 1) ++stats.n_cover;
    return stats;
}

}  // namespace viewplan

#endif  // VIEWPLAN_VISIBILITY_HPP_
