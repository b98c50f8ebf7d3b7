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

#ifndef VIEWPLAN_PLANNER_HPP_
#define VIEWPLAN_PLANNER_HPP_

#include <chrono>
#include <deque>
#include <string>
#include <vector>

#include "viewplan/mesh.hpp"
#include "viewplan/solver.hpp"
#include "viewplan/spectral.hpp"
#include "viewplan/synthetic.hpp"
#include "viewplan/viewgen.hpp"
#include "viewplan/visibility.hpp"

namespace viewplan {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct SpectralConfig {
    double theta = 0.5;
    double sigma = 0.35;
    int k_override = 0;        // 0 = derive k from the footprint rule
    double packing_rho = 0.5;  // packing efficiency in the footprint rule
    int kmeans_max_iter = 100;
    EigenvectorOrder order = EigenvectorOrder::SmallestNonzero;
};

struct PlanConfig {
    CameraModel camera;
    ConstraintSpace constraints;
    SpectralConfig cluster;
    GaParams ga;
    double delta = 1.0;           // target coverage ratio
    int max_outer_iters = 10;     // re-clustering rounds
    double offset_factor = 0.95;  // viewpoint offset = offset_factor * fod
    double subdivide_max_area = 0.0;  // m^2; 0 disables subdivision
    std::uint64_t seed = 0;
    bool flip_normals = false;
    int threads = 1;  // visibility rows only; results are thread-count invariant

    void validate() const {
        camera.validate();
        constraints.validate();
        ga.validate();
        if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must be in (0, 1]");
        if (!(offset_factor > 0.0 && offset_factor <= 1.0))
            throw ConfigError("offset_factor must be in (0, 1]");
        if (max_outer_iters < 1) throw ConfigError("max_outer_iters must be >= 1");
        if (!(cluster.theta > 0.0 && cluster.theta < 1.0))
            throw ConfigError("cluster.theta must be in (0, 1)");
        if (!(cluster.sigma > 0.0)) throw ConfigError("cluster.sigma must be > 0");
        if (cluster.k_override < 0) throw ConfigError("cluster.k must be >= 0");
        if (!(cluster.packing_rho > 0.0)) throw ConfigError("cluster.packing_rho must be > 0");
        if (subdivide_max_area < 0.0) throw ConfigError("subdivide_max_area must be >= 0");
    }

    double offset_distance() const { return offset_factor * camera.fod; }
};

/// One cluster per expected camera footprint: the footprint is the square
/// seen from the offset distance across the full view cone.
inline int auto_cluster_count(double subset_area, const PlanConfig& cfg) {
    const double side = 2.0 * cfg.offset_distance() * std::tan(deg2rad(cfg.camera.fov_deg) / 2.0);
    const double per_cluster = cfg.cluster.packing_rho * side * side;
    const int k = static_cast<int>(std::ceil(subset_area / per_cluster));
    return std::max(k, 1);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct StageTiming {
    double cluster_s = 0.0;
    double viewgen_s = 0.0;
    double visibility_s = 0.0;
    double solve_s = 0.0;
    double total_s = 0.0;
};

struct PlanReport {
    TriangleMesh mesh;  // after subdivision / normal flip
    std::vector<Viewpoint> pool;        // every feasible candidate, generation order
    VisibilityMatrix matrix;            // pool rows x mesh triangles
    std::vector<std::size_t> selected_rows;
    std::vector<Viewpoint> viewpoints;  // selected subset of the pool
    std::vector<int> cover_counts;      // per-triangle counts under the selection
    double coverage_ratio = 0.0;        // covered / all triangles
    std::vector<int> uncoverable;       // triangles no feasible candidate reaches
    std::size_t candidate_count = 0;
    int outer_iterations = 0;
    bool reached_target = false;  // delta met over the coverable set
    StageTiming timing;
    SolveResult solver;
};

namespace detail {

class StageClock {
public:
    using clock = std::chrono::steady_clock;
    explicit StageClock(double& sink) : sink_(sink), t0_(clock::now()) {}
    ~StageClock() {
        sink_ += std::chrono::duration<double>(clock::now() - t0_).count();
    }

private:
    double& sink_;
    clock::time_point t0_;
};

inline bool union_bit(const std::vector<std::uint64_t>& u, std::size_t j) {
    return (u[j / 64] >> (j % 64)) & 1u;
}

inline std::size_t union_popcount(const std::vector<std::uint64_t>& u) {
    std::size_t c = 0;
    for (std::uint64_t w : u) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

}  // namespace detail

/// Applies normal flip and subdivision per the config.
inline TriangleMesh prepare_mesh(const TriangleMesh& mesh, const PlanConfig& cfg) {
    TriangleMesh out = cfg.flip_normals ? mesh.flipped() : mesh;
    if (cfg.subdivide_max_area > 0.0) out = out.subdivided(cfg.subdivide_max_area);
    return out;
}

/// Generates one corrected candidate per cluster. Clusters with a cancelled
/// resultant (opposite-facing members) are split in two and retried; clusters
/// whose correction exhausts every retreat are dropped.
inline std::vector<Viewpoint> generate_candidates(const TriangleMesh& mesh,
                                                  const ClusterAssignment& assignment,
                                                  const PlanConfig& cfg, int* next_cluster_id) {
    std::vector<Viewpoint> out;
    const double d = cfg.offset_distance();
    std::deque<std::vector<int>> queue(assignment.members.begin(), assignment.members.end());
    int splits_left = 4 * static_cast<int>(assignment.members.size());
    while (!queue.empty()) {
        std::vector<int> members = std::move(queue.front());
        queue.pop_front();
        if (members.empty()) continue;
        const ClusterFrame frame = cluster_center_and_normal(mesh, members);
        if (frame.degenerate) {
            if (members.size() < 2 || splits_left <= 0) continue;
            --splits_left;
            ClusterParams sub;
            sub.theta = cfg.cluster.theta;
            sub.sigma = cfg.cluster.sigma;
            sub.k = 2;
            sub.kmeans_max_iter = cfg.cluster.kmeans_max_iter;
            sub.seed = cfg.seed ^ 0x9e3779b97f4a7c15ull ^ members.front();
            sub.order = cfg.cluster.order;
            ClusterAssignment split;
            try {
                split = cluster_mesh(mesh, members, sub);
            } catch (const Error&) {
                continue;  // coincident centroids etc.; cluster is unusable
            }
            for (auto& sub_members : split.members) queue.push_back(std::move(sub_members));
            continue;
        }
        const int id = (*next_cluster_id)++;
        const Viewpoint raw = generate_viewpoint(frame.center, frame.resultant, d, id);
        const CorrectionResult corrected =
            correct_viewpoint(raw, frame.center, frame.resultant, d, mesh, cfg.constraints);
        if (corrected.feasible) out.push_back(corrected.viewpoint);
    }
    return out;
}

// ---------------------------------------------------------------------------
// plan(): cluster -> generate -> correct -> visibility -> solve, repeated on
// the still-unseen triangles until the coverage target is reachable.
//
// A triangle that stays unseen after two rounds that included it (the initial
// pass plus one dedicated refinement round) is declared uncoverable and
// removed from the target.
// ---------------------------------------------------------------------------

inline PlanReport plan(const TriangleMesh& input_mesh, const PlanConfig& cfg) {
    cfg.validate();
    PlanReport report;
    detail::StageClock total_clock(report.timing.total_s);

    report.mesh = prepare_mesh(input_mesh, cfg);
    const TriangleMesh& mesh = report.mesh;
    const std::size_t n = mesh.triangle_count();
    const Bvh bvh(mesh);
    Rng rng(cfg.seed);

    report.matrix = VisibilityMatrix(0, n);
    std::vector<std::uint64_t> pool_union(BitMatrix::words_per_row(n), 0);
    std::vector<int> attempts(n, 0);
    std::vector<bool> uncoverable(n, false);
    int next_cluster_id = 0;

    auto effective_threshold = [&](std::size_t coverable_n) {
        return static_cast<std::size_t>(
            std::ceil(cfg.delta * static_cast<double>(coverable_n) - 1e-12));
    };

    bool solved = false;
    for (int iter = 1; iter <= cfg.max_outer_iters && !solved; ++iter) {
        report.outer_iterations = iter;

        std::vector<int> subset;
        for (std::size_t j = 0; j < n; ++j)
            if (!uncoverable[j] && !detail::union_bit(pool_union, j))
                subset.push_back(static_cast<int>(j));

        std::size_t added = 0;
        if (!subset.empty()) {
            double subset_area = 0.0;
            for (int j : subset) subset_area += mesh.area(j);
            int k = cfg.cluster.k_override > 0 ? cfg.cluster.k_override
                                               : auto_cluster_count(subset_area, cfg);
            // Refinement rounds chase scattered leftovers, not contiguous
            // patches; the footprint rule alone under-counts them badly.
            if (cfg.cluster.k_override == 0 && iter > 1)
                k = std::max<int>(k, static_cast<int>((subset.size() + 7) / 8));
            k = std::min<int>(k, static_cast<int>(subset.size()));

            ClusterAssignment assignment;
            {
                detail::StageClock clock(report.timing.cluster_s);
                ClusterParams params;
                params.theta = cfg.cluster.theta;
                params.sigma = cfg.cluster.sigma;
                params.k = k;
                params.kmeans_max_iter = cfg.cluster.kmeans_max_iter;
                params.seed = rng.fork_seed();
                params.order = cfg.cluster.order;
                if (subset.size() == 1) {
                    assignment.labels = {0};
                    assignment.members = {{subset[0]}};
                } else {
                    assignment = cluster_mesh(mesh, subset, params);
                }
            }

            std::vector<Viewpoint> fresh;
            {
                detail::StageClock clock(report.timing.viewgen_s);
                fresh = generate_candidates(mesh, assignment, cfg, &next_cluster_id);
            }
            added = fresh.size();
            if (added > 0) {
                detail::StageClock clock(report.timing.visibility_s);
                const std::size_t first = report.matrix.append_rows(added);
                fill_visibility_rows(report.matrix, first, fresh, mesh, cfg.camera, bvh,
                                     cfg.threads);
                for (std::size_t r = first; r < report.matrix.rows(); ++r)
                    report.matrix.or_row_into(r, pool_union);
                report.pool.insert(report.pool.end(), fresh.begin(), fresh.end());
            }
        }

        // Attempt accounting: a clustered-but-still-unseen triangle burns one
        // attempt; two burnt attempts move it out of the target.
        bool marks_changed = false;
        for (int j : subset) {
            if (detail::union_bit(pool_union, j)) continue;
            if (++attempts[j] >= 2) {
                uncoverable[j] = true;
                marks_changed = true;
            }
        }
        // A later candidate can reach a triangle written off earlier.
        for (std::size_t j = 0; j < n; ++j)
            if (uncoverable[j] && detail::union_bit(pool_union, j)) {
                uncoverable[j] = false;
                marks_changed = true;
            }

        std::size_t coverable_n = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (!uncoverable[j]) ++coverable_n;
        const std::size_t threshold = effective_threshold(coverable_n);

        if (threshold == 0) {
            // Everything is uncoverable; an empty selection meets the target.
            report.solver = SolveResult{};
            report.solver.best.bits.assign(report.matrix.rows(), 0);
            report.cover_counts.assign(n, 0);
            report.coverage_ratio = 0.0;
            report.reached_target = true;
            solved = true;
        } else if (detail::union_popcount(pool_union) >= threshold && !report.pool.empty()) {
            detail::StageClock clock(report.timing.solve_s);
            GaParams ga = cfg.ga;
            ga.seed = rng.fork_seed();
            ScpInstance inst = ScpInstance::with_threshold(report.matrix, threshold);
            report.solver = ga_hh_solve(inst, ga);
            const CoverageStats stats = coverage_stats(report.matrix, report.solver.best.bits);
            if (stats.n_cover >= threshold) {
                report.cover_counts = stats.counts;
                report.coverage_ratio =
                    static_cast<double>(stats.n_cover) / static_cast<double>(n);
                report.reached_target = true;
                solved = true;
            }
        } else if (added == 0 && !marks_changed) {
            std::vector<int> missing;
            for (std::size_t j = 0; j < n; ++j)
                if (!uncoverable[j] && !detail::union_bit(pool_union, j))
                    missing.push_back(static_cast<int>(j));
            throw InfeasibleError(
                "plan: outer iteration " + std::to_string(iter) +
                    " produced no new feasible candidates while " +
                    std::to_string(missing.size()) + " triangles remain uncovered",
                missing);
        }
    }

    if (!solved) {
        // Outer budget exhausted: finish against whatever the pool reaches.
        if (report.pool.empty())
            throw InfeasibleError("plan: no feasible candidates were generated");
        for (std::size_t j = 0; j < n; ++j)
            if (!detail::union_bit(pool_union, j)) uncoverable[j] = true;
        const std::size_t reachable = detail::union_popcount(pool_union);
        const std::size_t threshold = effective_threshold(reachable);
        if (threshold == 0) {
            report.solver = SolveResult{};
            report.solver.best.bits.assign(report.matrix.rows(), 0);
            report.cover_counts.assign(n, 0);
            report.coverage_ratio = 0.0;
        } else {
            detail::StageClock clock(report.timing.solve_s);
            GaParams ga = cfg.ga;
            ga.seed = rng.fork_seed();
            ScpInstance inst = ScpInstance::with_threshold(report.matrix, threshold);
            report.solver = ga_hh_solve(inst, ga);
            const CoverageStats stats = coverage_stats(report.matrix, report.solver.best.bits);
            report.cover_counts = stats.counts;
            report.coverage_ratio = static_cast<double>(stats.n_cover) / static_cast<double>(n);
        }
        report.reached_target = false;
    }

    for (std::size_t j = 0; j < n; ++j)
        if (uncoverable[j]) report.uncoverable.push_back(static_cast<int>(j));
    report.candidate_count = report.pool.size();
    for (std::size_t i = 0; i < report.pool.size(); ++i)
        if (report.solver.best.bits[i]) {
            report.selected_rows.push_back(i);
            report.viewpoints.push_back(report.pool[i]);
        }

    // Constraint compliance is re-asserted here, independent of viewgen.
    for (const Viewpoint& vp : report.viewpoints)
        if (!satisfies_constraints(vp.position, mesh, cfg.constraints))
            throw Error("plan: selected viewpoint violates placement constraints");

    return report;
}

// ---------------------------------------------------------------------------
// Random-sampling baseline: uniform positions in the fod-inflated bounding
// box, kept only when the clearance shell and height limit hold, aimed at
// the nearest triangle centroid.
// ---------------------------------------------------------------------------

inline std::vector<Viewpoint> random_sampling_baseline(const TriangleMesh& mesh,
                                                       const PlanConfig& cfg, std::size_t budget,
                                                       std::uint64_t seed) {
    if (budget < 1) throw ConfigError("random_sampling_baseline: budget must be >= 1");
    const Aabb box = mesh.bounding_box().inflated(cfg.camera.fod);
    Rng rng(seed);
    std::vector<Viewpoint> out;
    out.reserve(budget);
    const std::size_t max_attempts = 100 * budget;
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < budget; ++attempt) {
        Vec3 p;
        for (int a = 0; a < 3; ++a) p[a] = rng.uniform(box.min[a], box.max[a]);
        if (p.z() < cfg.constraints.h_limit_z) continue;

        std::size_t nearest = 0;
        double nearest_d = std::numeric_limits<double>::max();
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            const double d = (p - mesh.centroid(t)).norm();
            if (d < nearest_d) {
                nearest_d = d;
                nearest = t;
            }
        }
        if (nearest_d > cfg.camera.fod) continue;
        const double clearance = cfg.constraints.exact_clearance
                                     ? min_clearance(p, mesh, true)
                                     : nearest_d;
        if (clearance < cfg.constraints.d_safe) continue;

        Viewpoint vp;
        vp.position = p;
        vp.direction = (mesh.centroid(nearest) - p).normalized();
        vp.source_cluster = -1;
        out.push_back(vp);
    }
    if (out.size() < budget)
        throw InfeasibleError("random_sampling_baseline: only " + std::to_string(out.size()) +
                              " of " + std::to_string(budget) +
                              " candidates found within the attempt cap");
    return out;
}

/// Runs the optimization tail (uncoverable shrink + GA-HH) on a fixed pool.
/// Shared by the baseline arm of compare_methods.
struct PoolSolveResult {
    std::vector<std::size_t> selected_rows;
    std::vector<Viewpoint> viewpoints;
    double coverage_ratio = 0.0;
    std::size_t uncoverable = 0;
    SolveResult solver;
};

inline PoolSolveResult solve_pool(const TriangleMesh& mesh, const PlanConfig& cfg,
                                  const std::vector<Viewpoint>& pool,
                                  const VisibilityMatrix& matrix, std::uint64_t ga_seed) {
    const std::size_t n = mesh.triangle_count();
    std::vector<std::uint64_t> pool_union(BitMatrix::words_per_row(n), 0);
    for (std::size_t r = 0; r < matrix.rows(); ++r) matrix.or_row_into(r, pool_union);
    const std::size_t reachable = detail::union_popcount(pool_union);
    const std::size_t threshold = static_cast<std::size_t>(
        std::ceil(cfg.delta * static_cast<double>(reachable) - 1e-12));

    PoolSolveResult out;
    out.uncoverable = n - reachable;
    if (threshold == 0) {
        // The pool reaches nothing; an empty selection is the only answer.
        out.solver.best.bits.assign(matrix.rows(), 0);
        return out;
    }

    GaParams ga = cfg.ga;
    ga.seed = ga_seed;
    ScpInstance inst = ScpInstance::with_threshold(matrix, threshold);
    out.solver = ga_hh_solve(inst, ga);
    const CoverageStats stats = coverage_stats(matrix, out.solver.best.bits);
    out.coverage_ratio = static_cast<double>(stats.n_cover) / static_cast<double>(n);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (out.solver.best.bits[i]) {
            out.selected_rows.push_back(i);
            out.viewpoints.push_back(pool[i]);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Method comparison (proposed pipeline vs random-sampling baseline with a
// matched candidate budget).
// ---------------------------------------------------------------------------

struct ComparisonRun {
    std::string method;
    int run = 0;
    std::uint64_t seed = 0;
    std::size_t selected = 0;
    double coverage_ratio = 0.0;
    std::size_t candidates = 0;
    std::size_t uncoverable = 0;
    double wall_s = 0.0;  // reported separately from the deterministic CSVs
};

struct MethodSummary {
    std::string method;
    int repeats = 0;
    double mean_selected = 0.0, std_selected = 0.0;
    double mean_coverage = 0.0, std_coverage = 0.0;
    double mean_candidates = 0.0;
    double mean_wall_s = 0.0;
};

struct CurvePoint {
    std::string method;
    int run = 0;
    std::size_t candidate_count = 0;
    double uncovered_ratio = 0.0;
};

struct ComparisonResult {
    std::vector<ComparisonRun> runs;
    std::vector<MethodSummary> summary;
    std::vector<CurvePoint> curve;
};

namespace detail {

inline void append_curve(std::vector<CurvePoint>& curve, const std::string& method, int run,
                         const VisibilityMatrix& matrix) {
    const std::size_t n = matrix.cols();
    std::vector<std::uint64_t> acc(matrix.row_word_count(), 0);
    for (std::size_t b = 0; b < matrix.rows(); ++b) {
        matrix.or_row_into(b, acc);
        const double covered = static_cast<double>(union_popcount(acc));
        curve.push_back(
            {method, run, b + 1, 1.0 - covered / static_cast<double>(n)});
    }
}

inline MethodSummary summarize(const std::string& method,
                               const std::vector<ComparisonRun>& runs) {
    MethodSummary s;
    s.method = method;
    std::vector<double> sel, cov;
    for (const auto& r : runs) {
        if (r.method != method) continue;
        ++s.repeats;
        sel.push_back(static_cast<double>(r.selected));
        cov.push_back(r.coverage_ratio);
        s.mean_candidates += static_cast<double>(r.candidates);
        s.mean_wall_s += r.wall_s;
    }
    if (s.repeats == 0) return s;
    const double inv = 1.0 / s.repeats;
    s.mean_candidates *= inv;
    s.mean_wall_s *= inv;
    for (double v : sel) s.mean_selected += v * inv;
    for (double v : cov) s.mean_coverage += v * inv;
    for (double v : sel) s.std_selected += (v - s.mean_selected) * (v - s.mean_selected) * inv;
    for (double v : cov) s.std_coverage += (v - s.mean_coverage) * (v - s.mean_coverage) * inv;
    s.std_selected = std::sqrt(s.std_selected);
    s.std_coverage = std::sqrt(s.std_coverage);
    return s;
}

}  // namespace detail

inline ComparisonResult compare_methods(const TriangleMesh& input_mesh, const PlanConfig& cfg,
                                        int repeats) {
    if (repeats < 1) throw ConfigError("compare_methods: repeats must be >= 1");
    cfg.validate();
    ComparisonResult result;

    const TriangleMesh mesh = prepare_mesh(input_mesh, cfg);
    PlanConfig run_cfg = cfg;
    run_cfg.subdivide_max_area = 0.0;  // already applied
    run_cfg.flip_normals = false;
    const Bvh bvh(mesh);

    for (int r = 0; r < repeats; ++r) {
        run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
        Rng pair_rng(run_cfg.seed ^ 0xc2b2ae3d27d4eb4full);
        const std::uint64_t baseline_seed = pair_rng.fork_seed();
        const std::uint64_t baseline_ga_seed = pair_rng.fork_seed();

        using clock = std::chrono::steady_clock;
        const auto t0 = clock::now();
        const PlanReport proposed = plan(mesh, run_cfg);
        const double proposed_s = std::chrono::duration<double>(clock::now() - t0).count();
        result.runs.push_back({"proposed", r, run_cfg.seed, proposed.viewpoints.size(),
                               proposed.coverage_ratio, proposed.candidate_count,
                               proposed.uncoverable.size(), proposed_s});
        detail::append_curve(result.curve, "proposed", r, proposed.matrix);

        // The baseline gets the exact candidate budget the pipeline used.
        const auto t1 = clock::now();
        const std::vector<Viewpoint> baseline_pool =
            random_sampling_baseline(mesh, run_cfg, proposed.candidate_count, baseline_seed);
        VisibilityMatrix baseline_matrix(baseline_pool.size(), mesh.triangle_count());
        fill_visibility_rows(baseline_matrix, 0, baseline_pool, mesh, run_cfg.camera, bvh,
                             run_cfg.threads);
        const PoolSolveResult baseline =
            solve_pool(mesh, run_cfg, baseline_pool, baseline_matrix, baseline_ga_seed);
        const double baseline_s = std::chrono::duration<double>(clock::now() - t1).count();
        result.runs.push_back({"baseline", r, baseline_seed, baseline.viewpoints.size(),
                               baseline.coverage_ratio, baseline_pool.size(),
                               baseline.uncoverable, baseline_s});
        detail::append_curve(result.curve, "baseline", r, baseline_matrix);
    }

    result.summary.push_back(detail::summarize("proposed", result.runs));
    result.summary.push_back(detail::summarize("baseline", result.runs));
    return result;
}

// ---------------------------------------------------------------------------
// Visualization export: coverage-colored faces plus viewpoint markers and
// direction stubs (one 2-vertex edge per viewpoint).
// ---------------------------------------------------------------------------

inline Rgb coverage_color(int count) {
    if (count <= 0) return {220, 50, 40};   // uncovered: red
    if (count == 1) return {60, 180, 80};   // covered once: green
    const double t = std::min(count - 2, 4) / 4.0;  // blue gradient with depth
    auto lerp = [t](int a, int b) { return static_cast<std::uint8_t>(a + t * (b - a)); };
    return {lerp(80, 10), lerp(110, 20), lerp(255, 140)};
}

inline void export_visualization(const TriangleMesh& mesh,
                                 const std::vector<Viewpoint>& viewpoints,
                                 const std::vector<int>& cover_counts, const std::string& path) {
    std::vector<Rgb> face_colors(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
        face_colors[t] =
            coverage_color(t < cover_counts.size() ? cover_counts[t] : 0);

    PlyExtras extras;
    const double stub = std::max(0.5, 0.03 * mesh.bounding_box().diagonal());
    for (const auto& vp : viewpoints) {
        const int base = static_cast<int>(extras.points.size());
        extras.points.push_back(vp.position);
        extras.points.push_back(vp.position + stub * vp.direction);
        extras.point_colors.push_back({255, 215, 0});   // viewpoint marker
        extras.point_colors.push_back({255, 90, 200});  // stub tip
        extras.edges.emplace_back(base, base + 1);
    }
    write_ply(path, mesh, &face_colors, &extras);
}

inline void export_visualization(const PlanReport& report, const std::string& path) {
    export_visualization(report.mesh, report.viewpoints, report.cover_counts, path);
}

/// Cluster visualization: one deterministic palette color per cluster.
inline void export_cluster_ply(const TriangleMesh& mesh, const ClusterAssignment& assignment,
                               const std::vector<int>& subset, const std::string& path) {
    auto palette = [](int c) -> Rgb {
        const double hue = std::fmod(0.61803398875 * c, 1.0) * 6.0;
        const int i = static_cast<int>(hue);
        const double f = hue - i;
        const auto v = [](double x) { return static_cast<std::uint8_t>(55 + 200 * x); };
        switch (i % 6) {
            case 0: return {v(1), v(f), v(0)};
            case 1: return {v(1 - f), v(1), v(0)};
            case 2: return {v(0), v(1), v(f)};
            case 3: return {v(0), v(1 - f), v(1)};
            case 4: return {v(f), v(0), v(1)};
            default: return {v(1), v(0), v(1 - f)};
        }
    };
    std::vector<Rgb> face_colors(mesh.triangle_count(), Rgb{90, 90, 90});
    for (std::size_t i = 0; i < subset.size(); ++i)
        face_colors[subset[i]] = palette(assignment.labels[i]);
    write_ply(path, mesh, &face_colors, nullptr);
}

}  // namespace viewplan

#endif  // VIEWPLAN_PLANNER_HPP_
