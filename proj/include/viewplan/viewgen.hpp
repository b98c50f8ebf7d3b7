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

#ifndef VIEWPLAN_VIEWGEN_HPP_
#define VIEWPLAN_VIEWGEN_HPP_

#include <optional>
#include <vector>

#include "viewplan/mesh.hpp"

namespace viewplan {

/// Resultant vectors shorter than this are treated as cancelled (the cluster
/// mixes opposite-facing surfaces and cannot share one viewpoint).
constexpr double kDegenerateResultant = 1e-6;

/// Camera pose candidate: position plus unit view direction.
struct Viewpoint {
    Vec3 position = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();
    int source_cluster = -1;  // -1 when not generated from a cluster
};

/// Placement constraints for candidate viewpoints.
struct ConstraintSpace {
    double d_safe = 5.0;        // minimum clearance to the structure, meters
    double h_limit_z = 0.0;     // minimum allowed viewpoint height, meters
    int max_correction_iters = 20;
    double d_step = 0.0;           // retreat step; 0 selects 0.05 * d
    double correction_step = 0.0;  // potential-field step; 0 selects d_safe / 4
    bool exact_clearance = false;  // point-triangle distance instead of centroids

    double resolved_d_step(double d) const { return d_step > 0.0 ? d_step : 0.05 * d; }
    double resolved_correction_step() const {
        return correction_step > 0.0 ? correction_step : d_safe / 4.0;
    }
    void validate() const {
        if (!(d_safe > 0.0)) throw ConfigError("constraints: d_safe must be > 0");
        if (max_correction_iters < 1)
            throw ConfigError("constraints: max_correction_iters must be >= 1");
        if (d_step < 0.0 || correction_step < 0.0)
            throw ConfigError("constraints: steps must be >= 0 (0 = auto)");
    }
};

/// Aggregate of one cluster: mean member centroid and resultant of member
/// unit normals (unnormalized; its norm shrinks as orientations disagree).
struct ClusterFrame {
    Vec3 center = Vec3::Zero();
    Vec3 resultant = Vec3::Zero();
    bool degenerate = false;  // resultant norm below kDegenerateResultant
};

inline ClusterFrame cluster_center_and_normal(const TriangleMesh& mesh,
                                              const std::vector<int>& members) {
    if (members.empty()) throw GeometryError("cluster_center_and_normal: empty cluster");
    ClusterFrame frame;
    for (int t : members) {
        frame.center += mesh.centroid(t);
        frame.resultant += mesh.normal(t);
    }
    frame.center /= static_cast<double>(members.size());
    frame.resultant /= static_cast<double>(members.size());
    frame.degenerate = frame.resultant.norm() < kDegenerateResultant;
    return frame;
}

/// Offsets the cluster center by d along the normalized resultant and aims
/// the view back at the center.
inline Viewpoint generate_viewpoint(const Vec3& center, const Vec3& resultant, double d,
                                    int source_cluster = -1) {
    const double norm = resultant.norm();
    if (norm < kDegenerateResultant)
        throw GeometryError("generate_viewpoint: degenerate resultant vector");
    if (!(d > 0.0)) throw GeometryError("generate_viewpoint: offset distance must be > 0");
    Viewpoint vp;
    vp.position = center + d * (resultant / norm);
    vp.direction = (center - vp.position).normalized();
    vp.source_cluster = source_cluster;
    return vp;
}

namespace detail {

inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson-style closest point on triangle.
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + (d1 / (d1 - d3)) * ab)).norm();
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + (d2 / (d2 - d6)) * ac)).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + w * (c - b))).norm();
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return (p - (a + v * ab + w * ac)).norm();
}

}  // namespace detail

/// Distance from a point to the structure: nearest triangle centroid, or
/// nearest point on any triangle when `exact` is set.
inline double min_clearance(const Vec3& p, const TriangleMesh& mesh, bool exact = false) {
    double best = std::numeric_limits<double>::max();
    if (exact) {
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            const auto v = mesh.triangle_vertices(t);
            best = std::min(best, detail::point_triangle_distance(p, v[0], v[1], v[2]));
        }
    } else {
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
            best = std::min(best, (p - mesh.centroid(t)).norm());
    }
    return best;
}

/// Result of a potential-field evaluation at one position.
struct FieldResult {
    std::optional<Vec3> direction;  // unit correction vector, empty when compliant
    bool cancelled = false;         // violations exist but repulsions cancel out
};

/// Sums repulsions from every triangle whose distance to P violates d_safe.
inline FieldResult repulsion_correction(const Vec3& p, const TriangleMesh& mesh, double d_safe,
                                        bool exact = false) {
    Vec3 sum = Vec3::Zero();
    bool violated = false;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Vec3& c = mesh.centroid(t);
        double dist;
        if (exact) {
            const auto v = mesh.triangle_vertices(t);
            dist = detail::point_triangle_distance(p, v[0], v[1], v[2]);
        } else {
            dist = (p - c).norm();
        }
        if (dist < d_safe) {
            violated = true;
            sum += p - c;
        }
    }
    FieldResult r;
    if (!violated) return r;
    const double norm = sum.norm();
    if (norm < 1e-9) {
        r.cancelled = true;  // symmetric trap; caller retreats along the resultant
        return r;
    }
    r.direction = sum / norm;
    return r;
}

/// Attraction straight up to the height limit when P is below it.
inline std::optional<Vec3> altitude_correction(const Vec3& p, double h_limit_z) {
    if (p.z() < h_limit_z) {
        const Vec3 target(p.x(), p.y(), h_limit_z);
        return (target - p).normalized();  // always (0,0,1)
    }
    return std::nullopt;
}

inline bool satisfies_constraints(const Vec3& p, const TriangleMesh& mesh,
                                  const ConstraintSpace& cs) {
    if (p.z() < cs.h_limit_z) return false;
    return min_clearance(p, mesh, cs.exact_clearance) >= cs.d_safe;
}

/// Outcome of correct_viewpoint. `feasible == false` means the candidate
/// should be dropped from the pool.
struct CorrectionResult {
    Viewpoint viewpoint;
    bool feasible = false;
    int field_iterations = 0;  // phase-1 steps actually taken
    int retreats = 0;          // phase-2 offset reductions
};

// Phase 1 walks the summed potential-field corrections; phase 2 retreats the
// offset distance along the resultant and retries phase 1, until the
// constraints hold or the offset is exhausted.
inline CorrectionResult correct_viewpoint(const Viewpoint& vp, const Vec3& center,
                                          const Vec3& resultant, double d,
                                          const TriangleMesh& mesh, const ConstraintSpace& cs) {
    cs.validate();
    if (resultant.norm() < kDegenerateResultant)
        throw GeometryError("correct_viewpoint: degenerate resultant vector");
    const double step = cs.resolved_correction_step();
    const double d_step = cs.resolved_d_step(d);
    const Vec3 n_hat = resultant.normalized();

    CorrectionResult result;
    result.viewpoint = vp;

    auto run_field_phase = [&](Vec3 p) -> std::pair<Vec3, bool> {
        for (int i = 0; i < cs.max_correction_iters; ++i) {
            const FieldResult rep = repulsion_correction(p, mesh, cs.d_safe, cs.exact_clearance);
            const auto alt = altitude_correction(p, cs.h_limit_z);
            if (rep.cancelled) return {p, false};
            if (!rep.direction && !alt) return {p, true};
            Vec3 dir = Vec3::Zero();
            if (rep.direction) dir += *rep.direction;
            if (alt) dir += *alt;
            const double norm = dir.norm();
            if (norm < 1e-9) return {p, false};  // repulsion and attraction cancel
            p += step * (dir / norm);
            ++result.field_iterations;
        }
        return {p, satisfies_constraints(p, mesh, cs)};
    };

    auto [p, ok] = run_field_phase(vp.position);
    while (!ok) {
        ++result.retreats;
        const double offset = d - result.retreats * d_step;
        if (offset <= 0.0) {
            result.feasible = false;  // exhausted retreats; candidate discarded
            return result;
        }
        std::tie(p, ok) = run_field_phase(center + offset * n_hat);
    }

    result.viewpoint.position = p;
    result.viewpoint.direction = (center - p).normalized();
    result.viewpoint.source_cluster = vp.source_cluster;
    result.feasible = true;
    return result;
}

}  // namespace viewplan

#endif  // VIEWPLAN_VIEWGEN_HPP_
