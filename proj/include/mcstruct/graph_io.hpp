#ifndef MCSTRUCT_GRAPH_IO_HPP
#define MCSTRUCT_GRAPH_IO_HPP

#include "mcstruct/graph.hpp"

#include <string>
#include <vector>

namespace mcstruct {

/// A graph loaded from disk, with the original-node-id remapping.
/// Ids are remapped to dense 0-based indices in first-seen order.
struct LoadedGraph {
    AttributedGraph graph;
    std::vector<std::string> index_to_id;
    std::vector<int> labels;                 // empty when no label column
    std::vector<std::string> label_names;    // class index -> original label
};

/// Edge-list text file: one `src dst [weight]` per line, whitespace
/// separated, `#` starts a comment. Malformed lines raise
/// std::runtime_error naming the line number.
LoadedGraph load_edge_list(const std::string& path, bool directed = false);

void save_edge_list(const std::string& path, const AttributedGraph& g);

/// Citation dataset, Cora style: a `.content` file with lines
/// `node_id f1 ... fk label` and a `.cites` file with lines
/// `citing cited`. Features are stored as 0/1 reals, labels as class
/// indices (label names sorted for determinism), and the adjacency is
/// symmetrized. Duplicate content rows and cites lines that reference an
/// unknown id raise std::runtime_error with the offending id/line.
LoadedGraph load_citation_dataset(const std::string& content_path,
                                  const std::string& cites_path);

/// Writes the `index original_id` mapping alongside a loaded graph.
void save_id_mapping(const std::string& path, const LoadedGraph& loaded);

} // namespace mcstruct

#endif
