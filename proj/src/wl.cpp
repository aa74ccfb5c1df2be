#include "mcstruct/wl.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace mcstruct {

namespace {

// Signature of a node in one refinement round: own color plus the sorted
// multisets of (color, weight) over out- and in-neighbors.
using Signature = std::pair<int, std::pair<std::vector<std::pair<int, double>>,
                                           std::vector<std::pair<int, double>>>>;

std::vector<int> relabel_dense(const std::vector<Signature>& sigs) {
    std::map<Signature, int> ids;
    std::vector<int> colors(sigs.size());
    for (std::size_t v = 0; v < sigs.size(); ++v) {
        auto [it, inserted] = ids.try_emplace(sigs[v], static_cast<int>(ids.size()));
        colors[v] = it->second;
    }
    return colors;
}

} // namespace

std::vector<int> wl_refinement(const AttributedGraph& g, int max_rounds) {
    const int n = g.n();
    if (max_rounds < 0) max_rounds = n;

    // Initial colors from exact feature-row equality.
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::map<std::vector<double>, int> feature_ids;
    std::vector<int> colors(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        std::vector<double> row(g.node_features.row(v).begin(), g.node_features.row(v).end());
        auto [it, inserted] = feature_ids.try_emplace(std::move(row),
                                                      static_cast<int>(feature_ids.size()));
        colors[static_cast<std::size_t>(v)] = it->second;
    }

    for (int round = 0; round < max_rounds; ++round) {
        std::vector<Signature> sigs(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) {
            std::vector<std::pair<int, double>> out_nbrs, in_nbrs;
            for (int w = 0; w < n; ++w) {
                if (g.adjacency(v, w) != 0.0) {
                    out_nbrs.emplace_back(colors[static_cast<std::size_t>(w)], g.adjacency(v, w));
                }
                if (g.directed && g.adjacency(w, v) != 0.0) {
                    in_nbrs.emplace_back(colors[static_cast<std::size_t>(w)], g.adjacency(w, v));
                }
            }
            std::sort(out_nbrs.begin(), out_nbrs.end());
            std::sort(in_nbrs.begin(), in_nbrs.end());
            sigs[static_cast<std::size_t>(v)] = {colors[static_cast<std::size_t>(v)],
                                                 {std::move(out_nbrs), std::move(in_nbrs)}};
        }
        std::vector<int> next = relabel_dense(sigs);
        const int old_count = 1 + *std::max_element(colors.begin(), colors.end());
        const int new_count = 1 + *std::max_element(next.begin(), next.end());
        colors = std::move(next);
        if (new_count == old_count) break; // stable
    }
    return colors;
}

std::vector<std::vector<int>> wl_partition(const AttributedGraph& g) {
    const auto colors = wl_refinement(g);
    const int count = 1 + *std::max_element(colors.begin(), colors.end());
    std::vector<std::vector<int>> classes(static_cast<std::size_t>(count));
    for (int v = 0; v < g.n(); ++v) {
        classes[static_cast<std::size_t>(colors[static_cast<std::size_t>(v)])].push_back(v);
    }
    return classes;
}

} // namespace mcstruct
