#ifndef MCSTRUCT_WL_HPP
#define MCSTRUCT_WL_HPP

#include "mcstruct/graph.hpp"

#include <vector>

namespace mcstruct {

/// 1-WL color refinement. Returns a stable-color partition of the nodes.
///
/// This is a heuristic upper bound on the node orbits: it never splits a
/// true orbit, but may keep non-isomorphic nodes together. It is the
/// scalable alternative to node_orbits for n > 10 and is never used as
/// ground truth in tests.
///
/// Initial colors group nodes by exact feature-row equality; refinement
/// hashes the multiset of (neighbor color, edge weight) pairs, separately
/// for out- and in-neighborhoods when the graph is directed.
std::vector<int> wl_refinement(const AttributedGraph& g, int max_rounds = -1);

/// Groups node ids by refinement color.
std::vector<std::vector<int>> wl_partition(const AttributedGraph& g);

} // namespace mcstruct

#endif
