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

#ifndef VIEWPLAN_SPECTRAL_HPP_
#define VIEWPLAN_SPECTRAL_HPP_

#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "viewplan/mesh.hpp"

namespace viewplan {

/// Dense eigendecomposition is used; beyond this size callers should use a
/// coarser subdivision so per-call subsets stay small.
constexpr int kMaxSpectralSize = 2000;

/// Eigenvalues below this are treated as the zero eigenvalue of the
/// random-walk Laplacian and excluded from the embedding.
constexpr double kZeroEigenTolerance = 1e-10;

enum class EigenvectorOrder {
    SmallestNonzero,  // ascending from the smallest eigenvalue above zero
    LargestNonzero,   // descending from the largest eigenvalue
};

struct ClusterParams {
    double theta = 0.5;   // weight of the distance term against the normal-angle term
    double sigma = 0.35;  // Gaussian kernel bandwidth on normalized costs
    int k = 1;
    int kmeans_max_iter = 100;
    std::uint64_t seed = 0;
    EigenvectorOrder order = EigenvectorOrder::SmallestNonzero;

    void validate() const {
        if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("cluster: theta must be in (0,1)");
        if (!(sigma > 0.0)) throw ConfigError("cluster: sigma must be > 0");
        if (k < 1) throw ConfigError("cluster: k must be >= 1");
    }
};

/// Partition of a triangle subset into k clusters.
///
/// labels[i] is the cluster of the i-th subset position; members[c] holds
/// mesh-global triangle indices. No cluster is ever empty.
struct ClusterAssignment {
    std::vector<int> labels;
    std::vector<std::vector<int>> members;

    int cluster_count() const { return static_cast<int>(members.size()); }
};

// ---------------------------------------------------------------------------
// Pairwise clustering cost.
//
// Both the centroid-distance and the normal-angle terms are normalized to
// [0,1] (by the subset's maximum pairwise distance, and by pi) before the
// theta-weighted sum, so the two are commensurate.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd cost_matrix(const TriangleMesh& mesh, const std::vector<int>& subset,
                                   double theta) {
    const int n = static_cast<int>(subset.size());
    if (n < 2) throw GeometryError("cost_matrix: subset must contain at least 2 triangles");
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("cost_matrix: theta must be in (0,1)");

    Eigen::MatrixXd dist(n, n);
    double max_dist = 0.0;
    for (int i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double d = (mesh.centroid(subset[i]) - mesh.centroid(subset[j])).norm();
            dist(i, j) = dist(j, i) = d;
            max_dist = std::max(max_dist, d);
        }
    }
    if (max_dist <= 0.0)
        throw GeometryError("cost_matrix: all subset centroids coincide (degenerate subset)");

    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        g(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double s_hat = dist(i, j) / max_dist;
            const double gamma_hat =
                angle_between(mesh.normal(subset[i]), mesh.normal(subset[j])) / kPi;
            g(i, j) = g(j, i) = theta * s_hat + (1.0 - theta) * gamma_hat;
        }
    }
    return g;
}

/// Gaussian kernel similarity: W_ij = exp(-G_ij^2 / (2 sigma^2)), unit diagonal.
inline Eigen::MatrixXd similarity_matrix(const Eigen::MatrixXd& g, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("similarity_matrix: sigma must be > 0");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    Eigen::MatrixXd w = (-g.array().square() * inv).exp().matrix();
    // Exact symmetry and exact unit diagonal regardless of rounding.
    w = 0.5 * (w + w.transpose()).eval();
    w.diagonal().setOnes();
    return w;
}

/// Random-walk normalized Laplacian L = I - D^{-1} W.
inline Eigen::MatrixXd rw_laplacian(const Eigen::MatrixXd& w) {
    const Eigen::VectorXd degree = w.rowwise().sum();
    if ((degree.array() <= 0.0).any())
        throw SpectralError("rw_laplacian: zero-degree row in similarity matrix");
    Eigen::MatrixXd l = degree.cwiseInverse().asDiagonal() * w;
    l = -l;
    l.diagonal().array() += 1.0;
    return l;
}

// ---------------------------------------------------------------------------
// Eigen-embedding.
//
// Works on the symmetrized system D^{-1/2} W D^{-1/2}: its eigenpairs map to
// those of L_rw = I - D^{-1} W via lambda_rw = 1 - lambda_sym and
// u = D^{-1/2} y, which keeps the solve on a symmetric matrix.
// Rows of the returned n-by-k matrix are the per-triangle coordinates.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd spectral_embed(const Eigen::MatrixXd& w, int k,
                                      EigenvectorOrder order = EigenvectorOrder::SmallestNonzero) {
    const int n = static_cast<int>(w.rows());
    if (k >= n) throw SpectralError("spectral_embed: need k < n");
    if (n > kMaxSpectralSize)
        throw SpectralError("spectral_embed: subset of " + std::to_string(n) +
                            " exceeds the dense-solver limit of " +
                            std::to_string(kMaxSpectralSize) +
                            "; use a coarser subdivision so per-call subsets stay small");

    const Eigen::VectorXd degree = w.rowwise().sum();
    if ((degree.array() <= 0.0).any()) throw SpectralError("spectral_embed: zero-degree row");
    const Eigen::VectorXd d_isqrt = degree.array().rsqrt();
    Eigen::MatrixXd sym = d_isqrt.asDiagonal() * w * d_isqrt.asDiagonal();
    sym = 0.5 * (sym + sym.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw SpectralError("spectral_embed: eigendecomposition did not converge");

    // lambda_rw ascending = 1 - lambda_sym descending; the solver returns
    // lambda_sym ascending, so walk its columns from the back.
    std::vector<int> cols;
    for (int c = n - 1; c >= 0; --c) {
        const double lambda_rw = 1.0 - solver.eigenvalues()(c);
        if (lambda_rw > kZeroEigenTolerance) cols.push_back(c);
    }
    if (order == EigenvectorOrder::LargestNonzero) std::reverse(cols.begin(), cols.end());
    // Disconnected graphs can have several zero eigenvalues; fall back onto
    // them if fewer than k informative directions exist.
    for (int c = n - 1; c >= 0 && static_cast<int>(cols.size()) < k; --c)
        if (1.0 - solver.eigenvalues()(c) <= kZeroEigenTolerance) cols.push_back(c);

    Eigen::MatrixXd embed(n, k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd u = d_isqrt.asDiagonal() * solver.eigenvectors().col(cols[j]);
        u.normalize();
        // Deterministic sign: largest-magnitude entry is positive.
        int arg_max = 0;
        u.cwiseAbs().maxCoeff(&arg_max);
        if (u(arg_max) < 0.0) u = -u;
        embed.col(j) = u;
    }
    return embed;
}

// ---------------------------------------------------------------------------
// Lloyd's k-means with k-means++ seeding. Several seeded restarts are run
// and the lowest-inertia labeling kept; everything derives from `seed`.
// ---------------------------------------------------------------------------

constexpr int kKmeansRestarts = 8;

namespace detail {

inline ClusterAssignment kmeans_single(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                                       int max_iter, double* inertia_out) {
    const int n = static_cast<int>(points.rows());

    Rng rng(seed);
    Eigen::MatrixXd centroids(k, points.cols());

    // k-means++ seeding.
    centroids.row(0) = points.row(static_cast<int>(rng.next_below(n)));
    Eigen::VectorXd d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        int pick = 0;
        if (total > 0.0) {
            const double r = rng.next_double() * total;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.next_below(n));
        }
        centroids.row(c) = points.row(pick);
        d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (points.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(labels[i]) += points.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Empty-cluster repair: reseat at the point farthest from its
                // assigned centroid, then keep iterating.
                int far_i = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d = (points.row(i) - centroids.row(labels[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                centroids.row(c) = points.row(far_i);
                labels[far_i] = c;
                changed = true;
            } else {
                centroids.row(c) = sums.row(c) / counts[c];
            }
        }
        if (!changed) break;
    }

    ClusterAssignment out;
    out.labels = std::move(labels);
    out.members.assign(k, {});
    for (int i = 0; i < n; ++i) out.members[out.labels[i]].push_back(i);
    // Guard: repair above makes empty clusters impossible, but keep the
    // invariant explicit.
    for (const auto& m : out.members)
        if (m.empty()) throw SpectralError("kmeans: empty cluster after repair");
    if (inertia_out) {
        double inertia = 0.0;
        for (int i = 0; i < n; ++i)
            inertia += (points.row(i) - centroids.row(out.labels[i])).squaredNorm();
        *inertia_out = inertia;
    }
    return out;
}

}  // namespace detail

inline ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                                int max_iter = 100) {
    const int n = static_cast<int>(points.rows());
    if (k < 1 || n < k) throw GeometryError("kmeans: need 1 <= k <= n");

    Rng restart_rng(seed);
    ClusterAssignment best;
    double best_inertia = std::numeric_limits<double>::max();
    for (int attempt = 0; attempt < kKmeansRestarts; ++attempt) {
        double inertia = 0.0;
        ClusterAssignment run =
            detail::kmeans_single(points, k, restart_rng.fork_seed(), max_iter, &inertia);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best = std::move(run);
        }
    }
    return best;
}

/// Full pipeline: cost -> similarity -> Laplacian embedding -> k-means.
/// labels are positional against `subset`; members hold mesh triangle ids.
inline ClusterAssignment cluster_mesh(const TriangleMesh& mesh, const std::vector<int>& subset,
                                      const ClusterParams& params) {
    params.validate();
    const int n = static_cast<int>(subset.size());
    if (n < params.k) throw GeometryError("cluster_mesh: subset smaller than k");

    ClusterAssignment assign;
    if (n == params.k) {
        // One triangle per cluster; nothing to embed.
        assign.labels.resize(n);
        std::iota(assign.labels.begin(), assign.labels.end(), 0);
        assign.members.assign(n, {});
    } else {
        const Eigen::MatrixXd g = cost_matrix(mesh, subset, params.theta);
        const Eigen::MatrixXd w = similarity_matrix(g, params.sigma);
        const Eigen::MatrixXd embed = spectral_embed(w, params.k, params.order);
        assign = kmeans(embed, params.k, params.seed, params.kmeans_max_iter);
        for (auto& m : assign.members) m.clear();
    }
    for (int i = 0; i < n; ++i) assign.members[assign.labels[i]].push_back(subset[i]);
    return assign;
}

}  // namespace viewplan

#endif  // VIEWPLAN_SPECTRAL_HPP_
