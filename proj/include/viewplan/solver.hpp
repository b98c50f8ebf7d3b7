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

#ifndef VIEWPLAN_SOLVER_HPP_
#define VIEWPLAN_SOLVER_HPP_

#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewplan/bitmatrix.hpp"

namespace viewplan {

// ---------------------------------------------------------------------------
// Partial set covering instance.
//
// Rows of A are candidate viewpoints, columns are surface triangles. A
// selection is feasible when it covers at least ceil(delta * n) columns
// (ceiling avoids float-equality traps at delta = 1).
// ---------------------------------------------------------------------------

struct ScpInstance {
    BitMatrix a;
    double delta = 1.0;
    std::vector<std::size_t> row_popcount;  // cached |row_i|
    std::optional<std::size_t> threshold_override;

    static ScpInstance from(BitMatrix matrix, double delta) {
        if (!(delta > 0.0 && delta <= 1.0))
            throw ConfigError("scp: delta must be in (0, 1]");
        ScpInstance inst;
        inst.a = std::move(matrix);
        inst.delta = delta;
        inst.row_popcount.resize(inst.a.rows());
        for (std::size_t i = 0; i < inst.a.rows(); ++i)
            inst.row_popcount[i] = inst.a.row_popcount(i);
        return inst;
    }

    /// Exact required-cover count; used when the effective target comes from
    /// an integer count (e.g. a shrunken coverable set) rather than a ratio.
    static ScpInstance with_threshold(BitMatrix matrix, std::size_t threshold) {
        if (threshold < 1 || threshold > matrix.cols())
            throw ConfigError("scp: threshold must be in [1, n]");
        const double delta =
            static_cast<double>(threshold) / static_cast<double>(matrix.cols());
        ScpInstance inst = from(std::move(matrix), delta);
        inst.threshold_override = threshold;
        return inst;
    }

    std::size_t m() const { return a.rows(); }
    std::size_t n() const { return a.cols(); }
    std::size_t cover_threshold() const {
        if (threshold_override) return *threshold_override;
        return static_cast<std::size_t>(
            std::ceil(delta * static_cast<double>(n()) - 1e-12));
    }
};

/// Binary selection over the instance rows.
struct Solution {
    std::vector<std::uint8_t> bits;
    std::optional<double> cached_fitness;

    std::size_t count_selected() const {
        return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
    }
};

struct FitnessDetail {
    double value = 0.0;
    bool feasible = false;
    std::size_t n_cover = 0;
    std::size_t sum_c = 0;  // total cover count over all columns
};

/// Fitness of a selection; higher is better.
///
/// Feasible:    (m - |s|) + (1 - n_cover / sum_c)  -- integer part rewards
///              small selections, fractional part rewards redundancy.
/// Infeasible:  n_cover / (delta * n), always < 1.
inline FitnessDetail fitness_detail(const Solution& s, const ScpInstance& inst) {
    if (s.bits.size() != inst.m())
        throw GeometryError("fitness: solution length does not match instance");
    FitnessDetail out;
    const std::size_t words = inst.a.row_word_count();
    std::vector<std::uint64_t> acc(words, 0);
    std::size_t selected = 0;
    for (std::size_t i = 0; i < inst.m(); ++i) {
        if (!s.bits[i]) continue;
        ++selected;
        out.sum_c += inst.row_popcount[i];
        inst.a.or_row_into(i, acc);
    }
    for (std::uint64_t w : acc) out.n_cover += static_cast<std::size_t>(std::popcount(w));

    if (out.n_cover >= inst.cover_threshold() && out.sum_c > 0) {
        out.feasible = true;
        out.value = static_cast<double>(inst.m() - selected) +
                    (1.0 - static_cast<double>(out.n_cover) / static_cast<double>(out.sum_c));
    } else {
        out.feasible = false;
        out.value = static_cast<double>(out.n_cover) /
                    (inst.delta * static_cast<double>(inst.n()));
    }
    return out;
}

inline double fitness(const Solution& s, const ScpInstance& inst) {
    return fitness_detail(s, inst).value;
}

// ---------------------------------------------------------------------------
// Greedy cover: repeatedly take the row covering the most uncovered columns
// (ties -> lowest index) until the threshold is met.
// ---------------------------------------------------------------------------

inline Solution greedy_cover(const ScpInstance& inst) {
    const std::size_t words = inst.a.row_word_count();
    const std::size_t threshold = inst.cover_threshold();

    std::vector<std::uint64_t> all(words, 0);
    for (std::size_t i = 0; i < inst.m(); ++i) inst.a.or_row_into(i, all);
    std::size_t reachable = 0;
    for (std::uint64_t w : all) reachable += static_cast<std::size_t>(std::popcount(w));
    if (reachable < threshold) {
        std::vector<int> uncoverable;
        for (std::size_t j = 0; j < inst.n(); ++j)
            if (!((all[j / 64] >> (j % 64)) & 1u)) uncoverable.push_back(static_cast<int>(j));
        throw InfeasibleError("greedy_cover: full candidate set reaches only " +
                                  std::to_string(reachable) + " of " + std::to_string(threshold) +
                                  " required triangles",
                              uncoverable);
    }

    Solution s;
    s.bits.assign(inst.m(), 0);
    std::vector<std::uint64_t> covered(words, 0);
    std::size_t n_cover = 0;
    while (n_cover < threshold) {
        std::size_t best_row = inst.m();
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < inst.m(); ++i) {
            if (s.bits[i]) continue;
            const auto row = inst.a.row(i);
            std::size_t gain = 0;
            for (std::size_t w = 0; w < words; ++w)
                gain += static_cast<std::size_t>(std::popcount(row[w] & ~covered[w]));
            if (gain > best_gain) {
                best_gain = gain;
                best_row = i;
            }
        }
        if (best_row == inst.m()) break;  // cannot happen: reachability checked above
        s.bits[best_row] = 1;
        inst.a.or_row_into(best_row, covered);
        n_cover += best_gain;
    }
    return s;
}

/// Roulette-wheel draw: P_i proportional to fitnesses[i]. All-zero weights
/// degrade to a uniform draw. One uniform sample against the cumulative sum.
inline std::size_t roulette_select(std::span<const double> fitnesses, Rng& rng) {
    if (fitnesses.empty()) throw GeometryError("roulette_select: empty fitness list");
    double total = 0.0;
    for (double f : fitnesses) {
        if (f < 0.0) throw GeometryError("roulette_select: negative fitness");
        total += f;
    }
    if (total <= 0.0) return static_cast<std::size_t>(rng.next_below(fitnesses.size()));
    const double r = rng.next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < fitnesses.size(); ++i) {
        acc += fitnesses[i];
        if (acc >= r) return i;
    }
    return fitnesses.size() - 1;
}

// ---------------------------------------------------------------------------
// Low-level heuristics.
//
// Operator ids: 0 is the explicit no-op slot; 1..7 transform a solution
// using its population context. Every operator returns a fresh solution.
// ---------------------------------------------------------------------------

constexpr int kLlhOperatorCount = 7;  // ids 1..7; 0 is the no-op

/// Operator ids in a fixed-length program evolved by the high-level GA.
struct LlhVector {
    std::vector<int> ops;
};

/// Population context handed to an operator: the (live) population, who is
/// applying the operator, and the current fitness of self and neighbor.
struct LlhContext {
    std::span<const Solution> population;
    std::size_t self_index = 0;
    double fitness_self = 0.0;
    double fitness_adjacent = 0.0;

    const Solution& adjacent() const {
        return population[(self_index + 1) % population.size()];
    }
};

inline Solution apply_llh(int op, const Solution& s, const LlhContext& ctx, Rng& rng) {
    const std::size_t m = s.bits.size();
    Solution out = s;
    out.cached_fitness.reset();
    if (m == 0 || op == 0) return out;

    auto two_points = [&](std::size_t bound) {
        std::size_t a = rng.next_below(bound);
        std::size_t b = rng.next_below(bound);
        if (a > b) std::swap(a, b);
        return std::pair<std::size_t, std::size_t>{a, b};
    };

    switch (op) {
        case 1: {  // flip one random element
            const std::size_t i = rng.next_below(m);
            out.bits[i] ^= 1u;
            break;
        }
        case 2: {  // swap the values at two random positions
            if (m < 2) break;
            const std::size_t i = rng.next_below(m);
            std::size_t j = rng.next_below(m - 1);
            if (j >= i) ++j;
            std::swap(out.bits[i], out.bits[j]);
            break;
        }
        case 3: {  // segment exchange with the adjacent solution
            const auto [a, b] = two_points(m);
            const Solution& other = ctx.adjacent();
            for (std::size_t i = a; i <= b; ++i) out.bits[i] = other.bits[i];
            break;
        }
        case 4: {  // uniform bitmask mix with the adjacent solution
            const Solution& other = ctx.adjacent();
            for (std::size_t i = 0; i < m; ++i)
                if (!rng.bernoulli(0.5)) out.bits[i] = other.bits[i];
            break;
        }
        case 5: {  // uniform bitmask mix with a randomly chosen other solution
            if (ctx.population.size() < 2) break;
            std::size_t other_idx = rng.next_below(ctx.population.size() - 1);
            if (other_idx >= ctx.self_index) ++other_idx;
            const Solution& other = ctx.population[other_idx];
            for (std::size_t i = 0; i < m; ++i)
                if (!rng.bernoulli(0.5)) out.bits[i] = other.bits[i];
            break;
        }
        case 6: {  // fitness-proportional bitmask mix with the adjacent solution
            const double f1 = ctx.fitness_self, f2 = ctx.fitness_adjacent;
            const double density = (f1 + f2) > 0.0 ? f1 / (f1 + f2) : 0.5;
            const Solution& other = ctx.adjacent();
            for (std::size_t i = 0; i < m; ++i)
                if (!rng.bernoulli(density)) out.bits[i] = other.bits[i];
            break;
        }
        case 7: {  // multiple segment exchanges with the adjacent solution
            const Solution& other = ctx.adjacent();
            const int pairs = 2 + static_cast<int>(rng.next_below(3));  // 2..4
            for (int p = 0; p < pairs; ++p) {
                const auto [a, b] = two_points(m);
                for (std::size_t i = a; i <= b; ++i) out.bits[i] = other.bits[i];
            }
            break;
        }
        default:
            throw ConfigError("apply_llh: operator id out of range: " + std::to_string(op));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Solver parameters and shared result shape.
// ---------------------------------------------------------------------------

enum class Acceptance { NonWorsening, ImprovingOnly, Always };

struct GaParams {
    int population_size = 30;
    int llh_len = 5;
    double crossover_prob = 0.8;
    double mutation_prob = 0.1;
    int max_generations = 500;
    int stall_generations = 50;
    std::uint64_t seed = 0;
    Acceptance acceptance = Acceptance::NonWorsening;

    void validate() const {
        if (population_size < 2) throw ConfigError("ga: population_size must be >= 2");
        if (llh_len < 1) throw ConfigError("ga: llh_len must be >= 1");
        if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 ||
            mutation_prob > 1.0)
            throw ConfigError("ga: probabilities must be in [0, 1]");
        if (max_generations < 1 || stall_generations < 1)
            throw ConfigError("ga: generation counts must be >= 1");
    }
};

struct HistoryEntry {
    int generation = 0;
    double best_fitness = 0.0;
    std::size_t best_size = 0;
};

struct SolveResult {
    Solution best;
    std::vector<HistoryEntry> history;  // per-generation best (non-decreasing)
    int iterations_to_best = 0;         // generation at which the final best first appeared
    int generations_run = 0;
};

inline void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "generation,best_fitness,best_size\n";
    char buf[96];
    for (const auto& h : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%zu\n", h.generation, h.best_fitness,
                      h.best_size);
        out << buf;
    }
}

namespace detail {

// Feasible solutions always rank above infeasible ones when tracking the
// incumbent, regardless of raw fitness. (A full selection can have fitness
// < 1 while an infeasible near-cover approaches 1; the incumbent must stay
// feasible for the solver contract to hold.)
struct Incumbent {
    Solution solution;
    double fitness = -1.0;
    bool feasible = false;
    int found_at = 0;

    bool offer(const Solution& s, const FitnessDetail& fd, int generation) {
        const bool better = (fd.feasible && !feasible) ||
                            (fd.feasible == feasible && fd.value > fitness);
        if (better) {
            solution = s;
            fitness = fd.value;
            feasible = fd.feasible;
            found_at = generation;
            return true;
        }
        return false;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// GA-HH: genetic hyper-heuristic.
//
// The high-level GA evolves fixed-length operator programs (LlhVector);
// crossover and mutation act on programs only. Programs are then executed
// against their paired solutions with per-step move acceptance. Solutions
// start from the greedy cover; programs start random.
// ---------------------------------------------------------------------------

inline SolveResult ga_hh_solve(const ScpInstance& inst, const GaParams& params) {
    params.validate();
    const int pop_size = params.population_size;
    Rng rng(params.seed);

    const Solution seed_solution = greedy_cover(inst);  // throws if infeasible

    std::vector<Solution> sols(pop_size, seed_solution);
    std::vector<LlhVector> progs(pop_size);
    for (auto& prog : progs) {
        prog.ops.resize(params.llh_len);
        for (auto& op : prog.ops)
            op = static_cast<int>(rng.next_below(kLlhOperatorCount + 1));  // 0..7
    }

    std::vector<double> fits(pop_size);
    std::vector<FitnessDetail> details(pop_size);
    auto evaluate_all = [&] {
        for (int i = 0; i < pop_size; ++i) {
            details[i] = fitness_detail(sols[i], inst);
            fits[i] = details[i].value;
            sols[i].cached_fitness = fits[i];
        }
    };
    evaluate_all();

    detail::Incumbent best;
    for (int i = 0; i < pop_size; ++i) best.offer(sols[i], details[i], 0);

    SolveResult result;
    result.history.push_back({0, best.fitness, best.solution.count_selected()});

    auto accepts = [&](double f_new, double f_old) {
        switch (params.acceptance) {
            case Acceptance::NonWorsening: return f_new >= f_old;
            case Acceptance::ImprovingOnly: return f_new > f_old;
            case Acceptance::Always: return true;
        }
        return false;
    };

    int generation = 0;
    while (generation < params.max_generations &&
           generation - best.found_at < params.stall_generations) {
        ++generation;

        // Selection. Slot 0 is the elite pair, copied unchanged; the rest are
        // roulette draws. Programs and solutions replicate together.
        int elite = 0;
        for (int i = 1; i < pop_size; ++i) {
            const bool better = (details[i].feasible && !details[elite].feasible) ||
                                (details[i].feasible == details[elite].feasible &&
                                 fits[i] > fits[elite]);
            if (better) elite = i;
        }
        std::vector<Solution> next_sols;
        std::vector<LlhVector> next_progs;
        next_sols.reserve(pop_size);
        next_progs.reserve(pop_size);
        next_sols.push_back(sols[elite]);
        next_progs.push_back(progs[elite]);
        for (int i = 1; i < pop_size; ++i) {
            const std::size_t pick = roulette_select(fits, rng);
            next_sols.push_back(sols[pick]);
            next_progs.push_back(progs[pick]);
        }
        sols = std::move(next_sols);
        progs = std::move(next_progs);

        // Segmented crossover between consecutive non-elite programs: two
        // points are drawn and the elements between them are exchanged.
        for (int i = 1; i + 1 < pop_size; i += 2) {
            if (!rng.bernoulli(params.crossover_prob)) continue;
            std::size_t a = rng.next_below(params.llh_len);
            std::size_t b = rng.next_below(params.llh_len);
            if (a > b) std::swap(a, b);
            for (std::size_t j = a; j <= b; ++j) std::swap(progs[i].ops[j], progs[i + 1].ops[j]);
        }
        // One-point mutation on programs.
        for (int i = 1; i < pop_size; ++i) {
            if (!rng.bernoulli(params.mutation_prob)) continue;
            const std::size_t j = rng.next_below(params.llh_len);
            progs[i].ops[j] = static_cast<int>(rng.next_below(kLlhOperatorCount + 1));
        }

        // Execute each program against its paired solution with per-step
        // move acceptance. The elite pair is exempt.
        evaluate_all();
        for (int i = 1; i < pop_size; ++i) {
            for (int op : progs[i].ops) {
                if (op == 0) continue;
                LlhContext ctx{std::span<const Solution>(sols.data(), sols.size()),
                               static_cast<std::size_t>(i), fits[i],
                               fits[(i + 1) % pop_size]};
                Solution cand = apply_llh(op, sols[i], ctx, rng);
                const FitnessDetail fd = fitness_detail(cand, inst);
                if (accepts(fd.value, fits[i])) {
                    sols[i] = std::move(cand);
                    sols[i].cached_fitness = fd.value;
                    fits[i] = fd.value;
                    details[i] = fd;
                }
            }
        }

        evaluate_all();
        for (int i = 0; i < pop_size; ++i) best.offer(sols[i], details[i], generation);
        result.history.push_back({generation, best.fitness, best.solution.count_selected()});
    }

    result.best = best.solution;
    result.iterations_to_best = best.found_at;
    result.generations_run = generation;
    return result;
}

// ---------------------------------------------------------------------------
// Plain GA baseline: the same selection/elitism/termination machinery, but
// crossover and mutation act directly on solution bit vectors.
//
// The population starts from uniform random selections; the greedy warm
// start is a feature of the hyper-heuristic, not of this textbook baseline.
// The incumbent is therefore usually infeasible at first, and the recorded
// best fitness is non-decreasing from the generation the incumbent first
// turns feasible (raw fitness can step down once at that switch, since a
// full-selection feasible optimum scores below a near-cover).
// ---------------------------------------------------------------------------

inline SolveResult ga_solve(const ScpInstance& inst, const GaParams& params) {
    params.validate();
    const int pop_size = params.population_size;
    const std::size_t m = inst.m();
    Rng rng(params.seed);

    (void)greedy_cover(inst);  // feasibility gate; throws InfeasibleError

    std::vector<Solution> sols(pop_size);
    for (int i = 0; i < pop_size; ++i) {
        sols[i].bits.resize(m);
        for (auto& b : sols[i].bits) b = rng.bernoulli(0.5) ? 1 : 0;
    }

    std::vector<double> fits(pop_size);
    std::vector<FitnessDetail> details(pop_size);
    auto evaluate_all = [&] {
        for (int i = 0; i < pop_size; ++i) {
            details[i] = fitness_detail(sols[i], inst);
            fits[i] = details[i].value;
        }
    };
    evaluate_all();

    detail::Incumbent best;
    for (int i = 0; i < pop_size; ++i) best.offer(sols[i], details[i], 0);

    SolveResult result;
    result.history.push_back({0, best.fitness, best.solution.count_selected()});

    int generation = 0;
    while (generation < params.max_generations &&
           generation - best.found_at < params.stall_generations) {
        ++generation;

        int elite = 0;
        for (int i = 1; i < pop_size; ++i) {
            const bool better = (details[i].feasible && !details[elite].feasible) ||
                                (details[i].feasible == details[elite].feasible &&
                                 fits[i] > fits[elite]);
            if (better) elite = i;
        }
        std::vector<Solution> next_sols;
        next_sols.reserve(pop_size);
        next_sols.push_back(sols[elite]);
        for (int i = 1; i < pop_size; ++i)
            next_sols.push_back(sols[roulette_select(fits, rng)]);
        sols = std::move(next_sols);

        // Two-point crossover on solutions.
        for (int i = 1; i + 1 < pop_size; i += 2) {
            if (!rng.bernoulli(params.crossover_prob)) continue;
            std::size_t a = rng.next_below(m);
            std::size_t b = rng.next_below(m);
            if (a > b) std::swap(a, b);
            for (std::size_t j = a; j <= b; ++j) std::swap(sols[i].bits[j], sols[i + 1].bits[j]);
        }
        // Bit-flip mutation on solutions.
        for (int i = 1; i < pop_size; ++i) {
            if (!rng.bernoulli(params.mutation_prob)) continue;
            sols[i].bits[rng.next_below(m)] ^= 1u;
        }

        evaluate_all();
        for (int i = 0; i < pop_size; ++i) best.offer(sols[i], details[i], generation);
        result.history.push_back({generation, best.fitness, best.solution.count_selected()});
    }

    result.best = best.solution;
    result.iterations_to_best = best.found_at;
    result.generations_run = generation;
    return result;
}

// ---------------------------------------------------------------------------
// Exact solver for small instances (test oracle and CLI benchmark mode).
//
// Iterative deepening over the selection budget with a depth-first 0-first
// ordering: the first solution found at the smallest feasible budget is the
// lexicographically smallest optimum.
// ---------------------------------------------------------------------------

constexpr std::size_t kBruteForceMaxRows = 25;

inline Solution brute_force_scp(const ScpInstance& inst) {
    const std::size_t m = inst.m();
    if (m > kBruteForceMaxRows)
        throw GeometryError("brute_force_scp: instance has " + std::to_string(m) +
                            " rows, limit is " + std::to_string(kBruteForceMaxRows));
    const std::size_t threshold = inst.cover_threshold();
    const std::size_t words = inst.a.row_word_count();

    // Reachability (and the infeasibility report) mirror greedy_cover.
    (void)greedy_cover(inst);

    // Suffix-union popcounts: how much could rows i.. possibly still cover.
    std::vector<std::vector<std::uint64_t>> suffix(m + 1,
                                                   std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = m; i-- > 0;) {
        suffix[i] = suffix[i + 1];
        const auto row = inst.a.row(i);
        for (std::size_t w = 0; w < words; ++w) suffix[i][w] |= row[w];
    }

    std::vector<std::uint8_t> chosen(m, 0);
    std::vector<std::uint64_t> covered(words, 0);
    Solution found;

    auto count_cover = [&](const std::vector<std::uint64_t>& acc) {
        std::size_t c = 0;
        for (std::uint64_t w : acc) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    };

    std::function<bool(std::size_t, std::size_t, std::size_t)> dfs =
        [&](std::size_t i, std::size_t used, std::size_t budget) -> bool {
        const std::size_t n_cover = count_cover(covered);
        if (n_cover >= threshold) {
            found.bits = chosen;
            return true;
        }
        if (i == m || used == budget) return false;
        // Upper bound on what the remaining rows can add.
        std::vector<std::uint64_t> reach = covered;
        for (std::size_t w = 0; w < words; ++w) reach[w] |= suffix[i][w];
        if (count_cover(reach) < threshold) return false;

        // 0-branch first: earliest solutions are lexicographically smallest.
        if (dfs(i + 1, used, budget)) return true;
        chosen[i] = 1;
        std::vector<std::uint64_t> saved = covered;
        inst.a.or_row_into(i, covered);
        if (dfs(i + 1, used + 1, budget)) return true;
        covered = std::move(saved);
        chosen[i] = 0;
        return false;
    };

    for (std::size_t budget = 0; budget <= m; ++budget) {
        std::fill(chosen.begin(), chosen.end(), 0);
        std::fill(covered.begin(), covered.end(), 0);
        if (dfs(0, 0, budget)) return found;
    }
    throw InfeasibleError("brute_force_scp: unreachable");  // guarded above
}

}  // namespace viewplan

#endif  // VIEWPLAN_SOLVER_HPP_
