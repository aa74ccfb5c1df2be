#ifndef MCSTRUCT_GRAPH_HPP
#define MCSTRUCT_GRAPH_HPP

#include "mcstruct/rng.hpp"
#include "mcstruct/types.hpp"

#include <vector>

namespace mcstruct {

/// Attributed graph (A, X): dense adjacency with nonnegative real entries
/// (binary for unweighted graphs), zero diagonal, and an n x k feature
/// matrix. Undirected graphs store a symmetric adjacency. Immutable by
/// convention after construction; safe to share across threads.
struct AttributedGraph {
    Matrix adjacency;     // n x n
    Matrix node_features; // n x k, k >= 1
    bool directed = false;

    int n() const { return static_cast<int>(adjacency.rows()); }
    int feature_dim() const { return static_cast<int>(node_features.cols()); }
};

/// Builds a validated graph. Features default to a single all-ones column.
AttributedGraph make_graph(Matrix adjacency, Matrix node_features = Matrix(),
                           bool directed = false);

/// Bijection on {0, ..., n-1}; mapping[i] is the image of node i.
class Permutation {
public:
    explicit Permutation(std::vector<int> mapping);

    static Permutation identity(int n);
    static Permutation random(int n, Rng& rng);

    int operator()(int i) const { return mapping_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(mapping_.size()); }
    Permutation inverse() const;
    const std::vector<int>& mapping() const { return mapping_; }

    bool operator==(const Permutation& other) const = default;

private:
    std::vector<int> mapping_;
};

/// Nonempty subset of nodes, stored strictly ascending.
class VertexSubset {
public:
    explicit VertexSubset(std::vector<int> nodes);

    const std::vector<int>& nodes() const { return nodes_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }

    /// Image under a permutation, re-sorted (setwise action).
    VertexSubset mapped(const Permutation& p) const;

    bool operator==(const VertexSubset& other) const = default;
    bool operator<(const VertexSubset& other) const { return nodes_ < other.nodes_; }

private:
    std::vector<int> nodes_;
};

/// Partition of all k-subsets of V into automorphism orbits (k = arity;
/// k = 1 gives node orbits). Classes are pairwise disjoint and cover every
/// k-subset considered.
struct OrbitPartition {
    int arity = 1;
    std::vector<std::vector<VertexSubset>> classes;

    /// Index of the class containing s, or -1.
    int class_of(const VertexSubset& s) const;
    /// Node-index view of the classes; valid only for arity 1.
    std::vector<std::vector<int>> node_classes() const;
};

// -- permutation action ------------------------------------------------------

/// Relabels the graph: result.adjacency(p(i), p(j)) == g.adjacency(i, j) and
/// result.node_features.row(p(i)) == g.node_features.row(i). Applying the
/// inverse permutation afterwards recovers g exactly.
AttributedGraph apply_permutation(const AttributedGraph& g, const Permutation& p);

// -- exact (brute-force) isomorphism machinery, n <= 10 -----------------------

inline constexpr int kBruteForceNodeLimit = 10;

/// All permutations p with apply_permutation(g, p) == g, node features
/// included (exact equality by default; feature_tol > 0 switches to
/// entrywise tolerance). Always contains the identity.
/// Throws size_limit_error for n > 10; use wl_refinement for large graphs.
std::vector<Permutation> enumerate_automorphisms(const AttributedGraph& g,
                                                 double feature_tol = 0.0);

/// Automorphism orbits of the nodes.
OrbitPartition node_orbits(const AttributedGraph& g, double feature_tol = 0.0);

/// Automorphism orbits of all k-subsets, 1 <= k < n.
OrbitPartition joint_orbits(const AttributedGraph& g, int k, double feature_tol = 0.0);

/// True iff some permutation maps g1 exactly onto g2 (adjacency and
/// features). Differing node counts give false, not an error.
bool is_graph_isomorphic(const AttributedGraph& g1, const AttributedGraph& g2,
                         double feature_tol = 0.0);

// -- constructions -----------------------------------------------------------

/// Disjoint union of g0 with an exact copy; node i of the copy is i + n0.
/// Each node and its copy are isomorphic by construction.
AttributedGraph twin_graph(const AttributedGraph& g0);

/// Undirected view: adjacency replaced by max(A, A^T), directed flag cleared.
AttributedGraph symmetrized(const AttributedGraph& g);

/// G(n, p) with uniform features.
AttributedGraph erdos_renyi(int n, double p, Rng& rng, bool directed = false);

/// Two equal blocks, within-block edge probability p_in, across p_out.
AttributedGraph planted_two_block(int n, double p_in, double p_out, Rng& rng);

} // namespace mcstruct

#endif
