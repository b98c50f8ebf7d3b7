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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>

#include <CLI11.hpp>

#include "viewplan/config.hpp"
#include "viewplan/report.hpp"
#include "viewplan/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using namespace viewplan;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct PlanArgs {
    std::string mesh_path;
    std::string config_path;
    std::string out_dir = ".";
    std::int64_t seed = -1;  // -1 keeps the config value
    int threads = 0;         // 0 keeps the config value
};

PlanConfig load_plan_config(const PlanArgs& args) {
    PlanConfig cfg = args.config_path.empty() ? PlanConfig{} : load_config(args.config_path);
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (args.threads > 0) cfg.threads = args.threads;
    cfg.validate();
    return cfg;
}

int run_plan(const PlanArgs& args) {
    const PlanConfig cfg = load_plan_config(args);
    LoadReport load;
    const TriangleMesh mesh = TriangleMesh::load(args.mesh_path, MeshFormat::Auto, &load);
    if (load.dropped_degenerate > 0)
        std::cerr << "note: dropped " << load.dropped_degenerate << " degenerate triangles\n";

    const PlanReport report = plan(mesh, cfg);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    write_report_json((dir / "report.json").string(), report);
    write_viewpoints_json((dir / "viewpoints.json").string(), report.viewpoints);
    write_history_csv((dir / "coverage.csv").string(), report.solver.history);
    export_visualization(report, (dir / "visualization.ply").string());
    write_timing_json((dir / "timing.json").string(), report.timing);

    std::printf("viewpoints: %zu of %zu candidates, coverage %.4f, %d outer iteration%s\n",
                report.viewpoints.size(), report.candidate_count, report.coverage_ratio,
                report.outer_iterations, report.outer_iterations == 1 ? "" : "s");
    if (!report.uncoverable.empty())
        std::fprintf(stderr, "warning: %zu triangles are uncoverable under the constraints\n",
                     report.uncoverable.size());
    if (!report.reached_target) {
        std::fprintf(stderr, "warning: coverage target not met within max_outer_iters\n");
    }
    return kExitOk;
}

int run_compare(const PlanArgs& args, int repeats) {
    const PlanConfig cfg = load_plan_config(args);
    const TriangleMesh mesh = TriangleMesh::load(args.mesh_path);
    const ComparisonResult result = compare_methods(mesh, cfg, repeats);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    write_comparison_csv((dir / "comparison.csv").string(), result.summary);
    write_comparison_runs_csv((dir / "comparison_runs.csv").string(), result.runs);
    write_curve_csv((dir / "coverage_curve.csv").string(), result.curve);
    write_comparison_timing_csv((dir / "comparison_timing.csv").string(), result.runs,
                                result.summary);

    for (const auto& s : result.summary)
        std::printf("%-9s mean selected %.2f (std %.2f), mean coverage %.4f\n", s.method.c_str(),
                    s.mean_selected, s.std_selected, s.mean_coverage);
    return kExitOk;
}

int run_solve(const std::string& matrix_path, double delta, const std::string& algo,
              std::uint64_t seed, const std::string& history_path) {
    const BitMatrix matrix = BitMatrix::read(matrix_path);
    const ScpInstance inst = ScpInstance::from(matrix, delta);
    GaParams params;
    params.seed = seed;

    Solution best;
    SolveResult result;
    if (algo == "gahh") {
        result = ga_hh_solve(inst, params);
        best = result.best;
    } else if (algo == "ga") {
        result = ga_solve(inst, params);
        best = result.best;
    } else if (algo == "greedy") {
        best = greedy_cover(inst);
    } else if (algo == "exact") {
        best = brute_force_scp(inst);
    } else {
        throw ConfigError("solve: unknown algorithm '" + algo + "'");
    }

    const FitnessDetail fd = fitness_detail(best, inst);
    std::printf("%s: selected %zu of %zu rows, covered %zu of %zu columns, fitness %.6f\n",
                algo.c_str(), best.count_selected(), inst.m(), fd.n_cover, inst.n(), fd.value);
    if (!history_path.empty() && !result.history.empty())
        write_history_csv(history_path, result.history);
    return kExitOk;
}

int run_cluster(const std::string& mesh_path, int k, double theta, double sigma,
                double max_area, std::uint64_t seed, const std::string& out_path) {
    TriangleMesh mesh = TriangleMesh::load(mesh_path);
    if (max_area > 0.0) mesh = mesh.subdivided(max_area);
    std::vector<int> subset(mesh.triangle_count());
    std::iota(subset.begin(), subset.end(), 0);

    ClusterParams params;
    params.theta = theta;
    params.sigma = sigma;
    params.k = k;
    params.seed = seed;
    const ClusterAssignment assignment = cluster_mesh(mesh, subset, params);
    export_cluster_ply(mesh, assignment, subset, out_path);

    std::printf("clustered %zu triangles into %d clusters -> %s\n", mesh.triangle_count(), k,
                out_path.c_str());
    return kExitOk;
}

int run_make_mesh(const std::string& shape, const std::string& out_path) {
    TriangleMesh mesh;
    if (shape == "plate") mesh = make_plate(10.0, 10.0);
    else if (shape == "cube") mesh = make_cube(10.0);
    else if (shape == "open-box") mesh = make_open_box(10.0);
    else if (shape == "house") mesh = make_house();
    else if (shape == "l-tower") mesh = make_l_tower();
    else if (shape == "cavity-box") mesh = make_cavity_box();
    else throw ConfigError("make-mesh: unknown shape '" + shape + "'");

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << "# viewplan synthetic shape: " << shape << "\n";
    char buf[128];
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& t : mesh.triangles())
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    std::printf("wrote %s (%zu triangles)\n", out_path.c_str(), mesh.triangle_count());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"viewplan: clustering-based view planning for surface inspection"};
    app.require_subcommand(1);

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "Plan viewpoints for a mesh");
    plan_cmd->add_option("--mesh", plan_args.mesh_path, "Input mesh (.obj/.stl/.ply)")
        ->required();
    plan_cmd->add_option("--config", plan_args.config_path, "Config file (key = value lines)");
    plan_cmd->add_option("--seed", plan_args.seed, "Seed override");
    plan_cmd->add_option("--out-dir", plan_args.out_dir, "Output directory");
    plan_cmd->add_option("--threads", plan_args.threads, "Visibility worker threads");

    PlanArgs compare_args;
    int repeats = 10;
    auto* compare_cmd = app.add_subcommand("compare", "Proposed pipeline vs random baseline");
    compare_cmd->add_option("--mesh", compare_args.mesh_path, "Input mesh")->required();
    compare_cmd->add_option("--config", compare_args.config_path, "Config file");
    compare_cmd->add_option("--repeats", repeats, "Paired runs per method");
    compare_cmd->add_option("--seed", compare_args.seed, "Seed override");
    compare_cmd->add_option("--out-dir", compare_args.out_dir, "Output directory");
    compare_cmd->add_option("--threads", compare_args.threads, "Visibility worker threads");

    std::string matrix_path, algo = "gahh", history_path;
    double delta = 1.0;
    std::uint64_t solve_seed = 0;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a stored visibility matrix");
    solve_cmd->add_option("--matrix", matrix_path, "Bit-matrix file")->required();
    solve_cmd->add_option("--delta", delta, "Target coverage ratio");
    solve_cmd->add_option("--algo", algo, "gahh|ga|greedy|exact");
    solve_cmd->add_option("--seed", solve_seed, "Solver seed");
    solve_cmd->add_option("--history", history_path, "Write per-generation history CSV here");

    std::string cluster_mesh_path, cluster_out = "clusters.ply";
    int cluster_k = 8;
    double cluster_theta = 0.5, cluster_sigma = 0.35, cluster_max_area = 0.0;
    std::uint64_t cluster_seed = 0;
    auto* cluster_cmd = app.add_subcommand("cluster", "Spectral-cluster a mesh and color it");
    cluster_cmd->add_option("--mesh", cluster_mesh_path, "Input mesh")->required();
    cluster_cmd->add_option("--k", cluster_k, "Cluster count")->required();
    cluster_cmd->add_option("--theta", cluster_theta, "Distance weight in (0,1)");
    cluster_cmd->add_option("--sigma", cluster_sigma, "Gaussian kernel bandwidth");
    cluster_cmd->add_option("--subdivide-max-area", cluster_max_area,
                            "Subdivide before clustering (0 = off)");
    cluster_cmd->add_option("--seed", cluster_seed, "k-means seed");
    cluster_cmd->add_option("--out", cluster_out, "Output PLY path");

    std::string shape, shape_out = "mesh.obj";
    auto* make_cmd = app.add_subcommand("make-mesh", "Write a synthetic test mesh as OBJ");
    make_cmd->add_option("--shape", shape, "plate|cube|open-box|house|l-tower|cavity-box")
        ->required();
    make_cmd->add_option("--out", shape_out, "Output OBJ path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan_cmd->parsed()) return run_plan(plan_args);
        if (compare_cmd->parsed()) return run_compare(compare_args, repeats);
        if (solve_cmd->parsed())
            return run_solve(matrix_path, delta, algo, solve_seed, history_path);
        if (cluster_cmd->parsed())
            return run_cluster(cluster_mesh_path, cluster_k, cluster_theta, cluster_sigma,
                               cluster_max_area, cluster_seed, cluster_out);
        if (make_cmd->parsed()) return run_make_mesh(shape, shape_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitIo;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
