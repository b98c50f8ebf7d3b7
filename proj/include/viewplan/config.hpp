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

#ifndef VIEWPLAN_CONFIG_HPP_
#define VIEWPLAN_CONFIG_HPP_

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "viewplan/planner.hpp"

namespace viewplan {

// Flat key = value configuration, one entry per line. '#' starts a comment.
// Every key mirrors a PlanConfig field; unknown keys are rejected so typos
// surface immediately.
//
//   camera.fod = 30.0
//   camera.fov_deg = 80.0
//   cluster.packing_rho = 0.02
//   delta = 1.0
//   seed = 7

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct ConfigReader {
    std::map<std::string, std::string> values;

    double number(const std::string& key, double fallback) {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        std::istringstream ss(it->second);
        double v;
        if (!(ss >> v)) throw ConfigError("config: key '" + key + "' is not a number");
        consumed.insert(key);
        return v;
    }
    std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        std::istringstream ss(it->second);
        std::uint64_t v;
        if (!(ss >> v)) throw ConfigError("config: key '" + key + "' is not an integer");
        consumed.insert(key);
        return v;
    }
    bool boolean(const std::string& key, bool fallback) {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        consumed.insert(key);
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("config: key '" + key + "' must be true/false");
    }
    std::string text(const std::string& key, const std::string& fallback) {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        consumed.insert(key);
        return it->second;
    }

    std::set<std::string> consumed;
};

}  // namespace detail

inline PlanConfig parse_config(std::istream& in) {
    detail::ConfigReader reader;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        if (!reader.values.emplace(key, value).second)
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
    }

    PlanConfig cfg;
    cfg.camera.fod = reader.number("camera.fod", cfg.camera.fod);
    cfg.camera.fov_deg = reader.number("camera.fov_deg", cfg.camera.fov_deg);
    cfg.camera.beta_max_deg = reader.number("camera.beta_max_deg", cfg.camera.beta_max_deg);
    cfg.camera.min_range = reader.number("camera.min_range", cfg.camera.min_range);
    cfg.camera.strict_vertices = reader.boolean("camera.strict_vertices", false);

    cfg.constraints.d_safe = reader.number("constraints.d_safe", cfg.constraints.d_safe);
    cfg.constraints.h_limit_z = reader.number("constraints.h_limit_z", cfg.constraints.h_limit_z);
    cfg.constraints.max_correction_iters = static_cast<int>(
        reader.integer("constraints.max_correction_iters", cfg.constraints.max_correction_iters));
    cfg.constraints.d_step = reader.number("constraints.d_step", cfg.constraints.d_step);
    cfg.constraints.correction_step =
        reader.number("constraints.correction_step", cfg.constraints.correction_step);
    cfg.constraints.exact_clearance = reader.boolean("constraints.exact_clearance", false);

    cfg.cluster.theta = reader.number("cluster.theta", cfg.cluster.theta);
    cfg.cluster.sigma = reader.number("cluster.sigma", cfg.cluster.sigma);
    cfg.cluster.k_override = static_cast<int>(reader.integer("cluster.k", 0));
    cfg.cluster.packing_rho = reader.number("cluster.packing_rho", cfg.cluster.packing_rho);
    cfg.cluster.kmeans_max_iter =
        static_cast<int>(reader.integer("cluster.kmeans_max_iter", cfg.cluster.kmeans_max_iter));
    const std::string order = reader.text("cluster.eigenvector_order", "smallest");
    if (order == "smallest") cfg.cluster.order = EigenvectorOrder::SmallestNonzero;
    else if (order == "largest") cfg.cluster.order = EigenvectorOrder::LargestNonzero;
    else throw ConfigError("config: cluster.eigenvector_order must be smallest|largest");

    cfg.ga.population_size =
        static_cast<int>(reader.integer("ga.population_size", cfg.ga.population_size));
    cfg.ga.llh_len = static_cast<int>(reader.integer("ga.llh_len", cfg.ga.llh_len));
    cfg.ga.crossover_prob = reader.number("ga.crossover_prob", cfg.ga.crossover_prob);
    cfg.ga.mutation_prob = reader.number("ga.mutation_prob", cfg.ga.mutation_prob);
    cfg.ga.max_generations =
        static_cast<int>(reader.integer("ga.max_generations", cfg.ga.max_generations));
    cfg.ga.stall_generations =
        static_cast<int>(reader.integer("ga.stall_generations", cfg.ga.stall_generations));
    const std::string acceptance = reader.text("ga.acceptance", "non_worsening");
    if (acceptance == "non_worsening") cfg.ga.acceptance = Acceptance::NonWorsening;
    else if (acceptance == "improving_only") cfg.ga.acceptance = Acceptance::ImprovingOnly;
    else if (acceptance == "always") cfg.ga.acceptance = Acceptance::Always;
    else
        throw ConfigError(
            "config: ga.acceptance must be non_worsening|improving_only|always");

    cfg.delta = reader.number("delta", cfg.delta);
    cfg.max_outer_iters = static_cast<int>(reader.integer("max_outer_iters", cfg.max_outer_iters));
    cfg.offset_factor = reader.number("offset_factor", cfg.offset_factor);
    cfg.subdivide_max_area = reader.number("subdivide_max_area", cfg.subdivide_max_area);
    cfg.seed = reader.integer("seed", cfg.seed);
    cfg.flip_normals = reader.boolean("flip_normals", false);
    cfg.threads = static_cast<int>(reader.integer("threads", cfg.threads));

    for (const auto& [key, value] : reader.values)
        if (!reader.consumed.count(key)) throw ConfigError("config: unknown key '" + key + "'");

    cfg.validate();
    return cfg;
}

inline PlanConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    return parse_config(in);
}

}  // namespace viewplan

#endif  // VIEWPLAN_CONFIG_HPP_
