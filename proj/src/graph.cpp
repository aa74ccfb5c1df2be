#include "mcstruct/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mcstruct {

AttributedGraph make_graph(Matrix adjacency, Matrix node_features, bool directed) {
    const auto n = adjacency.rows();
    require(n > 0 && adjacency.cols() == n, "adjacency must be square and nonempty");
    require(adjacency.allFinite(), "adjacency entries must be finite");
    require((adjacency.array() >= 0.0).all(), "adjacency entries must be nonnegative");
    require(adjacency.diagonal().isZero(0.0), "self-loops are not allowed");
    if (node_features.size() == 0) {
        node_features = Matrix::Ones(n, 1);
    }
    require(node_features.rows() == n, "node_features must have one row per node");
    require(node_features.cols() >= 1, "node_features must have at least one column");
    require(node_features.allFinite(), "node_features entries must be finite");
    if (!directed) {
        require(adjacency == adjacency.transpose(),
                "undirected graph requires a symmetric adjacency");
    }
    return AttributedGraph{std::move(adjacency), std::move(node_features), directed};
}

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
    const int n = static_cast<int>(mapping_.size());
    require(n > 0, "permutation must be nonempty");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int image : mapping_) {
        require(image >= 0 && image < n && !seen[static_cast<std::size_t>(image)],
                "permutation mapping must be a bijection on {0..n-1}");
        seen[static_cast<std::size_t>(image)] = true;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
}

Permutation Permutation::random(int n, Rng& rng) {
    std::vector<int> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 0);
    rng.shuffle(m);
    return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(mapping_.size());
    for (int i = 0; i < size(); ++i) {
        inv[static_cast<std::size_t>(mapping_[static_cast<std::size_t>(i)])] = i;
    }
    return Permutation(std::move(inv));
}

VertexSubset::VertexSubset(std::vector<int> nodes) : nodes_(std::move(nodes)) {
    require(!nodes_.empty(), "vertex subset must be nonempty");
    std::sort(nodes_.begin(), nodes_.end());
    require(nodes_.front() >= 0, "vertex indices must be nonnegative");
    require(std::adjacent_find(nodes_.begin(), nodes_.end()) == nodes_.end(),
            "vertex subset must not contain duplicates");
}

VertexSubset VertexSubset::mapped(const Permutation& p) const {
    std::vector<int> out;
    out.reserve(nodes_.size());
    for (int v : nodes_) out.push_back(p(v));
    return VertexSubset(std::move(out));
}

int OrbitPartition::class_of(const VertexSubset& s) const {
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (std::find(classes[c].begin(), classes[c].end(), s) != classes[c].end()) {
            return static_cast<int>(c);
        }
    }
    return -1;
}

std::vector<std::vector<int>> OrbitPartition::node_classes() const {
    require(arity == 1, "node_classes is defined for arity-1 partitions only");
    std::vector<std::vector<int>> out;
    out.reserve(classes.size());
    for (const auto& cls : classes) {
        std::vector<int> ids;
        ids.reserve(cls.size());
        for (const auto& s : cls) ids.push_back(s[0]);
        out.push_back(std::move(ids));
    }
    return out;
}

AttributedGraph apply_permutation(const AttributedGraph& g, const Permutation& p) {
    require(p.size() == g.n(), "permutation length must equal the node count");
    const int n = g.n();
    Matrix adj(n, n);
    Matrix feat(n, g.node_features.cols());
    for (int i = 0; i < n; ++i) {
        feat.row(p(i)) = g.node_features.row(i);
        for (int j = 0; j < n; ++j) {
            adj(p(i), p(j)) = g.adjacency(i, j);
        }
    }
    return AttributedGraph{std::move(adj), std::move(feat), g.directed};
}

namespace {

bool features_match(const Matrix& a, const Matrix& b, int i, int j, double tol) {
    if (tol <= 0.0) return a.row(i) == b.row(j);
    return ((a.row(i) - b.row(j)).array().abs() <= tol).all();
}

// Checks whether perm maps g1 onto g2 exactly.
bool maps_onto(const AttributedGraph& g1, const AttributedGraph& g2,
               const std::vector<int>& perm, double feature_tol) {
    const int n = g1.n();
    for (int i = 0; i < n; ++i) {
        if (!features_match(g1.node_features, g2.node_features, i,
                            perm[static_cast<std::size_t>(i)], feature_tol)) {
            return false;
        }
    }
    for (int i = 0; i < n; ++i) {
        const int pi = perm[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            if (g1.adjacency(i, j) != g2.adjacency(pi, perm[static_cast<std::size_t>(j)])) {
                return false;
            }
        }
    }
    return true;
}

void check_brute_force_bound(int n) {
    if (n > kBruteForceNodeLimit) {
        throw size_limit_error(
            "exact automorphism search is limited to n <= 10; "
            "use wl_refinement for a scalable orbit upper bound");
    }
}

// Union-find over a fixed universe.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            x = parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

std::vector<std::vector<int>> k_subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return out;
}

} // namespace

std::vector<Permutation> enumerate_automorphisms(const AttributedGraph& g,
                                                 double feature_tol) {
    check_brute_force_bound(g.n());
    std::vector<int> perm(static_cast<std::size_t>(g.n()));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Permutation> autos;
    do {
        if (maps_onto(g, g, perm, feature_tol)) autos.emplace_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return autos;
}

OrbitPartition node_orbits(const AttributedGraph& g, double feature_tol) {
    const auto autos = enumerate_automorphisms(g, feature_tol);
    UnionFind uf(static_cast<std::size_t>(g.n()));
    for (const auto& p : autos) {
        for (int v = 0; v < g.n(); ++v) uf.unite(v, p(v));
    }
    OrbitPartition part;
    part.arity = 1;
    std::vector<int> root_to_class(static_cast<std::size_t>(g.n()), -1);
    for (int v = 0; v < g.n(); ++v) {
        const int r = uf.find(v);
        if (root_to_class[static_cast<std::size_t>(r)] < 0) {
            root_to_class[static_cast<std::size_t>(r)] = static_cast<int>(part.classes.size());
            part.classes.emplace_back();
        }
        part.classes[static_cast<std::size_t>(root_to_class[static_cast<std::size_t>(r)])]
            .push_back(VertexSubset({v}));
    }
    return part;
}

OrbitPartition joint_orbits(const AttributedGraph& g, int k, double feature_tol) {
    require(k >= 1 && k < g.n(), "joint_orbits requires 1 <= k < n");
    check_brute_force_bound(g.n());
    const auto autos = enumerate_automorphisms(g, feature_tol);
    const auto subsets = k_subsets(g.n(), k);

    std::vector<VertexSubset> universe;
    universe.reserve(subsets.size());
    for (const auto& s : subsets) universe.emplace_back(s);
    std::vector<VertexSubset> sorted_universe = universe;
    std::sort(sorted_universe.begin(), sorted_universe.end());
    auto index_of = [&](const VertexSubset& s) {
        return static_cast<int>(std::lower_bound(sorted_universe.begin(),
                                                 sorted_universe.end(), s) -
                                sorted_universe.begin());
    };

    UnionFind uf(sorted_universe.size());
    for (const auto& p : autos) {
        for (std::size_t i = 0; i < sorted_universe.size(); ++i) {
            uf.unite(static_cast<int>(i), index_of(sorted_universe[i].mapped(p)));
        }
    }
    OrbitPartition part;
    part.arity = k;
    std::vector<int> root_to_class(sorted_universe.size(), -1);
    for (std::size_t i = 0; i < sorted_universe.size(); ++i) {
        const int r = uf.find(static_cast<int>(i));
        if (root_to_class[static_cast<std::size_t>(r)] < 0) {
            root_to_class[static_cast<std::size_t>(r)] = static_cast<int>(part.classes.size());
            part.classes.emplace_back();
        }
        part.classes[static_cast<std::size_t>(root_to_class[static_cast<std::size_t>(r)])]
            .push_back(sorted_universe[i]);
    }
    return part;
}

bool is_graph_isomorphic(const AttributedGraph& g1, const AttributedGraph& g2,
                         double feature_tol) {
    if (g1.n() != g2.n()) return false;
    if (g1.node_features.cols() != g2.node_features.cols()) return false;
    check_brute_force_bound(g1.n());
    check_brute_force_bound(g2.n());
    std::vector<int> perm(static_cast<std::size_t>(g1.n()));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        if (maps_onto(g1, g2, perm, feature_tol)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

AttributedGraph twin_graph(const AttributedGraph& g0) {
    const int n0 = g0.n();
    Matrix adj = Matrix::Zero(2 * n0, 2 * n0);
    adj.topLeftCorner(n0, n0) = g0.adjacency;
    adj.bottomRightCorner(n0, n0) = g0.adjacency;
    Matrix feat(2 * n0, g0.node_features.cols());
    feat.topRows(n0) = g0.node_features;
    feat.bottomRows(n0) = g0.node_features;
    return AttributedGraph{std::move(adj), std::move(feat), g0.directed};
}

AttributedGraph symmetrized(const AttributedGraph& g) {
    Matrix adj = g.adjacency.cwiseMax(g.adjacency.transpose());
    return AttributedGraph{std::move(adj), g.node_features, false};
}

AttributedGraph erdos_renyi(int n, double p, Rng& rng, bool directed) {
    Matrix adj = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = directed ? 0 : i + 1; j < n; ++j) {
            if (i == j) continue;
            if (rng.uniform() < p) {
                adj(i, j) = 1.0;
                if (!directed) adj(j, i) = 1.0;
            }
        }
    }
    return make_graph(std::move(adj), Matrix(), directed);
}

AttributedGraph planted_two_block(int n, double p_in, double p_out, Rng& rng) {
    Matrix adj = Matrix::Zero(n, n);
    const int half = n / 2;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool same_block = (i < half) == (j < half);
            if (rng.uniform() < (same_block ? p_in : p_out)) {
                adj(i, j) = adj(j, i) = 1.0;
            }
        }
    }
    return make_graph(std::move(adj));
}

} // namespace mcstruct
