// Test-only reference implementations. These stay independent of the
// library's computation paths: the eigensolver is a hand-rolled cyclic
// Jacobi, the orbit oracle enumerates permutations directly off the
// adjacency, and the gradient oracle is plain central differences.
#ifndef MCSTRUCT_TESTS_ORACLES_HPP
#define MCSTRUCT_TESTS_ORACLES_HPP

#include "mcstruct/graph.hpp"
#include "mcstruct/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracles {

using mcstruct::Matrix;
using mcstruct::Vector;

// Cyclic Jacobi eigendecomposition of a symmetric matrix. A = V diag(w) V^T,
// eigenvalues descending.
inline void jacobi_eigen_symmetric(Matrix A, Matrix& V, Vector& w,
                                   double tol = 1e-14, int max_sweeps = 100) {
    const int n = static_cast<int>(A.rows());
    V = Matrix::Identity(n, n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        }
        if (std::sqrt(2.0 * off) <= tol * std::max(1.0, A.norm())) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (A(p, q) == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    w = A.diagonal();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return w(a) > w(b); });
    Vector w_sorted(n);
    Matrix V_sorted(n, n);
    for (int i = 0; i < n; ++i) {
        w_sorted(i) = w(order[static_cast<std::size_t>(i)]);
        V_sorted.col(i) = V.col(order[static_cast<std::size_t>(i)]);
    }
    w = w_sorted;
    V = V_sorted;
}

// Singular values of a square matrix through the spectrum of M^T M.
inline Vector dense_singular_values(const Matrix& M) {
    Matrix V;
    Vector w;
    jacobi_eigen_symmetric(M.transpose() * M, V, w);
    Vector sigma(w.size());
    for (int i = 0; i < w.size(); ++i) sigma(i) = std::sqrt(std::max(0.0, w(i)));
    return sigma;
}

// Exhaustive node-orbit oracle: reads the adjacency and features directly,
// no library calls. Returns a canonical partition (classes sorted).
inline std::vector<std::vector<int>> exhaustive_node_orbits(const mcstruct::AttributedGraph& g) {
    const int n = g.n();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    do {
        bool automorphism = true;
        for (int i = 0; i < n && automorphism; ++i) {
            if (g.node_features.row(i) != g.node_features.row(perm[static_cast<std::size_t>(i)])) {
                automorphism = false;
                break;
            }
            for (int j = 0; j < n; ++j) {
                if (g.adjacency(i, j) != g.adjacency(perm[static_cast<std::size_t>(i)],
                                                     perm[static_cast<std::size_t>(j)])) {
                    automorphism = false;
                    break;
                }
            }
        }
        if (automorphism) {
            for (int v = 0; v < n; ++v) {
                parent[static_cast<std::size_t>(find(v))] = find(perm[static_cast<std::size_t>(v)]);
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<std::vector<int>> classes;
    std::vector<int> root_to_class(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        const int r = find(v);
        if (root_to_class[static_cast<std::size_t>(r)] < 0) {
            root_to_class[static_cast<std::size_t>(r)] = static_cast<int>(classes.size());
            classes.emplace_back();
        }
        classes[static_cast<std::size_t>(root_to_class[static_cast<std::size_t>(r)])].push_back(v);
    }
    for (auto& c : classes) std::sort(c.begin(), c.end());
    std::sort(classes.begin(), classes.end());
    return classes;
}

// Central finite differences of a scalar function at x.
inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-4) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Area under the ROC curve by brute force over all (positive, negative)
// score pairs; ties count one half.
inline double brute_force_auc(const std::vector<double>& positive_scores,
                              const std::vector<double>& negative_scores) {
    double wins = 0.0;
    for (double p : positive_scores) {
        for (double q : negative_scores) {
            if (p > q) wins += 1.0;
            else if (p == q) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(positive_scores.size()) *
                   static_cast<double>(negative_scores.size()));
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_value = 0.0;
};

// Two-pass mean and standard error.
inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double var = 0.0;
        for (double x : xs) var += (x - out.mean) * (x - out.mean);
        var /= static_cast<double>(xs.size() - 1);
        out.stderr_value = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return out;
}

} // namespace oracles

#endif
