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

#ifndef VIEWPLAN_COMMON_HPP_
#define VIEWPLAN_COMMON_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace viewplan {

using Vec3 = Eigen::Vector3d;

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto process exit codes.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
struct IoError : Error {
    using Error::Error;
};

/// File opened but its contents are not valid for the declared format.
struct ParseError : Error {
    using Error::Error;
};

/// Invalid configuration value or key.
struct ConfigError : Error {
    using Error::Error;
};

/// Geometric precondition violated (empty mesh, degenerate input, ...).
struct GeometryError : Error {
    using Error::Error;
};

/// Numerical failure inside the spectral pipeline.
struct SpectralError : Error {
    using Error::Error;
};

/// The covering instance cannot reach the requested coverage target.
/// `uncoverable` lists the element (triangle) indices no candidate reaches.
struct InfeasibleError : Error {
    std::vector<int> uncoverable;
    explicit InfeasibleError(const std::string& msg, std::vector<int> unc = {})
        : Error(msg), uncoverable(std::move(unc)) {}
};

// ---------------------------------------------------------------------------
// Axis-aligned bounding box
// ---------------------------------------------------------------------------

struct Aabb {
    Vec3 min{Vec3::Constant(std::numeric_limits<double>::max())};
    Vec3 max{Vec3::Constant(std::numeric_limits<double>::lowest())};

    void extend(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        min = min.cwiseMin(b.min);
        max = max.cwiseMax(b.max);
    }
    bool empty() const { return (min.array() > max.array()).any(); }
    Vec3 extent() const { return max - min; }
    double diagonal() const { return empty() ? 0.0 : extent().norm(); }
    Vec3 center() const { return 0.5 * (min + max); }

    Aabb inflated(double r) const {
        return Aabb{min - Vec3::Constant(r), max + Vec3::Constant(r)};
    }

    /// Slab test for a ray `origin + t*dir`, hit reported for t in [0, t_max].
    bool intersects_ray(const Vec3& origin, const Vec3& inv_dir, double t_max) const {
        double t0 = 0.0, t1 = t_max;
        for (int a = 0; a < 3; ++a) {
            double ta = (min[a] - origin[a]) * inv_dir[a];
            double tb = (max[a] - origin[a]) * inv_dir[a];
            if (ta > tb) std::swap(ta, tb);
            t0 = ta > t0 ? ta : t0;
            t1 = tb < t1 ? tb : t1;
            if (t0 > t1) return false;
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Seeded random stream
//
// All stochastic code draws from this wrapper instead of <random>
// distributions, so a (seed, draw order) pair fully determines every run
// independent of the standard library implementation.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        // Lemire's multiply-shift rejection method; unbiased and portable.
        std::uint64_t x = gen_();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                x = gen_();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    /// Derive an independent child seed (for per-stage sub-streams).
    std::uint64_t fork_seed() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }

/// Angle in radians between two nonzero vectors, robust near 0 and pi.
inline double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace viewplan

#endif  // VIEWPLAN_COMMON_HPP_
