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

#ifndef VIEWPLAN_REPORT_HPP_
#define VIEWPLAN_REPORT_HPP_

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "viewplan/planner.hpp"

namespace viewplan {

// All artifacts below are deterministic functions of (inputs, seed): wall
// clock timings are kept out of report.json and comparison.csv and written
// to dedicated timing files instead, so reruns are byte-identical.

using OrderedJson = nlohmann::ordered_json;

inline OrderedJson viewpoint_to_json(const Viewpoint& vp) {
    return OrderedJson{{"position", {vp.position.x(), vp.position.y(), vp.position.z()}},
                       {"direction", {vp.direction.x(), vp.direction.y(), vp.direction.z()}},
                       {"cluster", vp.source_cluster}};
}

inline void write_viewpoints_json(const std::string& path,
                                  const std::vector<Viewpoint>& viewpoints) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& vp : viewpoints) arr.push_back(viewpoint_to_json(vp));
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << arr.dump(2) << "\n";
}

inline void write_report_json(const std::string& path, const PlanReport& report) {
    OrderedJson j;
    j["mesh"] = {{"triangles", report.mesh.triangle_count()},
                 {"vertices", report.mesh.vertex_count()},
                 {"total_area", report.mesh.total_area()}};
    j["coverage_ratio"] = report.coverage_ratio;
    j["reached_target"] = report.reached_target;
    j["candidate_count"] = report.candidate_count;
    j["selected_count"] = report.viewpoints.size();
    j["outer_iterations"] = report.outer_iterations;
    j["uncoverable"] = report.uncoverable;
    j["solver"] = {{"iterations_to_best", report.solver.iterations_to_best},
                   {"generations_run", report.solver.generations_run},
                   {"best_fitness", report.solver.history.empty()
                                        ? 0.0
                                        : report.solver.history.back().best_fitness}};
    OrderedJson arr = OrderedJson::array();
    for (const auto& vp : report.viewpoints) arr.push_back(viewpoint_to_json(vp));
    j["viewpoints"] = std::move(arr);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

inline void write_timing_json(const std::string& path, const StageTiming& timing) {
    OrderedJson j{{"cluster_s", timing.cluster_s},
                  {"viewgen_s", timing.viewgen_s},
                  {"visibility_s", timing.visibility_s},
                  {"solve_s", timing.solve_s},
                  {"total_s", timing.total_s}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

inline void write_comparison_csv(const std::string& path,
                                 const std::vector<MethodSummary>& summary) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "method,repeats,mean_selected,std_selected,mean_coverage,std_coverage,"
           "mean_candidates\n";
    char buf[256];
    for (const auto& s : summary) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%.6f,%.6f,%.2f\n", s.method.c_str(),
                      s.repeats, s.mean_selected, s.std_selected, s.mean_coverage,
                      s.std_coverage, s.mean_candidates);
        out << buf;
    }
}

inline void write_comparison_runs_csv(const std::string& path,
                                      const std::vector<ComparisonRun>& runs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "method,run,seed,selected,coverage_ratio,candidates,uncoverable\n";
    char buf[256];
    for (const auto& r : runs) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%llu,%zu,%.6f,%zu,%zu\n", r.method.c_str(), r.run,
                      static_cast<unsigned long long>(r.seed), r.selected, r.coverage_ratio,
                      r.candidates, r.uncoverable);
        out << buf;
    }
}

inline void write_comparison_timing_csv(const std::string& path,
                                        const std::vector<ComparisonRun>& runs,
                                        const std::vector<MethodSummary>& summary) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "method,run,wall_s\n";
    char buf[128];
    for (const auto& r : runs) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.3f\n", r.method.c_str(), r.run, r.wall_s);
        out << buf;
    }
    for (const auto& s : summary) {
        std::snprintf(buf, sizeof(buf), "%s,mean,%.3f\n", s.method.c_str(), s.mean_wall_s);
        out << buf;
    }
}

inline void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "method,run,candidate_count,uncovered_ratio\n";
    char buf[128];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%zu,%.6f\n", p.method.c_str(), p.run,
                      p.candidate_count, p.uncovered_ratio);
        out << buf;
    }
}

}  // namespace viewplan

#endif  // VIEWPLAN_REPORT_HPP_
