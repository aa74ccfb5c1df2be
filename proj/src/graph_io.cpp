#include "mcstruct/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace mcstruct {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

int intern(std::map<std::string, int>& ids, std::vector<std::string>& names,
           const std::string& id) {
    auto [it, inserted] = ids.try_emplace(id, static_cast<int>(names.size()));
    if (inserted) names.push_back(id);
    return it->second;
}

} // namespace

LoadedGraph load_edge_list(const std::string& path, bool directed) {
    auto in = open_or_throw(path);
    std::map<std::string, int> ids;
    std::vector<std::string> names;
    std::vector<std::tuple<int, int, double>> edges;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(strip_comment(line));
        std::string src, dst;
        if (!(ss >> src)) continue; // blank or comment-only
        if (!(ss >> dst)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected `src dst [weight]`");
        }
        double weight = 1.0;
        ss >> weight;
        edges.emplace_back(intern(ids, names, src), intern(ids, names, dst), weight);
    }
    if (names.empty()) throw std::runtime_error(path + ": no edges found");

    const int n = static_cast<int>(names.size());
    Matrix adj = Matrix::Zero(n, n);
    for (auto [u, v, w] : edges) {
        adj(u, v) = w;
        if (!directed) adj(v, u) = w;
    }
    LoadedGraph out;
    out.graph = make_graph(std::move(adj), Matrix(), directed);
    out.index_to_id = std::move(names);
    return out;
}

void save_edge_list(const std::string& path, const AttributedGraph& g) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write file: " + path);
    outf << "# src dst weight\n";
    for (int i = 0; i < g.n(); ++i) {
        for (int j = g.directed ? 0 : i + 1; j < g.n(); ++j) {
            if (g.adjacency(i, j) != 0.0) {
                outf << i << ' ' << j << ' ' << g.adjacency(i, j) << '\n';
            }
        }
    }
}

LoadedGraph load_citation_dataset(const std::string& content_path,
                                  const std::string& cites_path) {
    auto content = open_or_throw(content_path);
    std::map<std::string, int> ids;
    std::vector<std::string> names;
    std::vector<std::vector<double>> feature_rows;
    std::vector<std::string> raw_labels;

    std::string line;
    while (std::getline(content, line)) {
        std::istringstream ss(line);
        std::vector<std::string> fields;
        std::string field;
        while (ss >> field) fields.push_back(field);
        if (fields.empty()) continue;
        if (fields.size() < 3) {
            throw std::runtime_error(content_path + ": row for node '" + fields[0] +
                                     "' needs at least one feature and a label");
        }
        if (ids.count(fields[0])) {
            throw std::runtime_error(content_path + ": duplicate node row '" + fields[0] + "'");
        }
        intern(ids, names, fields[0]);
        std::vector<double> row;
        row.reserve(fields.size() - 2);
        for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
            row.push_back(std::stod(fields[i]) != 0.0 ? 1.0 : 0.0);
        }
        feature_rows.push_back(std::move(row));
        raw_labels.push_back(fields.back());
    }
    if (names.empty()) throw std::runtime_error(content_path + ": no node rows found");
    const std::size_t k = feature_rows.front().size();
    for (std::size_t i = 0; i < feature_rows.size(); ++i) {
        if (feature_rows[i].size() != k) {
            throw std::runtime_error(content_path + ": row for node '" + names[i] +
                                     "' has an inconsistent feature count");
        }
    }

    // Class indices in sorted label order, for determinism.
    std::vector<std::string> label_names(raw_labels.begin(), raw_labels.end());
    std::sort(label_names.begin(), label_names.end());
    label_names.erase(std::unique(label_names.begin(), label_names.end()),
                      label_names.end());
    auto label_index = [&](const std::string& s) {
        return static_cast<int>(std::lower_bound(label_names.begin(), label_names.end(), s) -
                                label_names.begin());
    };

    const int n = static_cast<int>(names.size());
    Matrix features(n, static_cast<int>(k));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            features(i, static_cast<int>(j)) = feature_rows[static_cast<std::size_t>(i)][j];
        }
        labels[static_cast<std::size_t>(i)] = label_index(raw_labels[static_cast<std::size_t>(i)]);
    }

    auto cites = open_or_throw(cites_path);
    Matrix adj = Matrix::Zero(n, n);
    int line_no = 0;
    while (std::getline(cites, line)) {
        ++line_no;
        std::istringstream ss(strip_comment(line));
        std::string citing, cited;
        if (!(ss >> citing)) continue;
        if (!(ss >> cited)) {
            throw std::runtime_error(cites_path + ":" + std::to_string(line_no) +
                                     ": expected `citing cited`");
        }
        for (const auto& id : {citing, cited}) {
            if (!ids.count(id)) {
                throw std::runtime_error(cites_path + ":" + std::to_string(line_no) +
                                         ": unknown node id '" + id + "'");
            }
        }
        const int u = ids[citing], v = ids[cited];
        if (u == v) continue; // self-citations would be self-loops
        adj(u, v) = adj(v, u) = 1.0;
    }

    LoadedGraph out;
    out.graph = make_graph(std::move(adj), std::move(features), false);
    out.index_to_id = std::move(names);
    out.labels = std::move(labels);
    out.label_names = std::move(label_names);
    return out;
}

void save_id_mapping(const std::string& path, const LoadedGraph& loaded) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write file: " + path);
    outf << "# index original_id\n";
    for (std::size_t i = 0; i < loaded.index_to_id.size(); ++i) {
        outf << i << ' ' << loaded.index_to_id[i] << '\n';
    }
}

} // namespace mcstruct
