#include "mcstruct/tasks.hpp"

#include "mcstruct/rng.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mcstruct {

std::string split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "train";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw std::invalid_argument("unknown split name: " + name);
}

std::vector<TaskInstance> TaskSet::split_instances(Split s) const {
    std::vector<TaskInstance> out;
    for (const auto& inst : instances) {
        if (inst.split == s) out.push_back(inst);
    }
    return out;
}

namespace {

void check_fractions(const SplitFractions& f) {
    require(f.train >= 0.0 && f.val >= 0.0 && f.test >= 0.0,
            "split fractions must be nonnegative");
    require(std::abs(f.train + f.val + f.test - 1.0) < 1e-9,
            "split fractions must sum to 1");
}

// Splits `count` items as train/val/test sizes, largest-remainder rounding.
std::array<int, 3> split_sizes(int count, const SplitFractions& f) {
    const double raw[3] = {f.train * count, f.val * count, f.test * count};
    std::array<int, 3> sizes{static_cast<int>(raw[0]), static_cast<int>(raw[1]),
                             static_cast<int>(raw[2])};
    int assigned = sizes[0] + sizes[1] + sizes[2];
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return raw[a] - static_cast<int>(raw[a]) > raw[b] - static_cast<int>(raw[b]);
    });
    for (int i = 0; assigned < count; ++i, ++assigned) {
        ++sizes[static_cast<std::size_t>(order[static_cast<std::size_t>(i % 3)])];
    }
    return sizes;
}

Split split_of_rank(int rank, const std::array<int, 3>& sizes) {
    if (rank < sizes[0]) return Split::train;
    if (rank < sizes[0] + sizes[1]) return Split::val;
    return Split::test;
}

std::vector<std::pair<int, int>> undirected_edges(const AttributedGraph& g) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < g.n(); ++u) {
        for (int v = u + 1; v < g.n(); ++v) {
            if (g.adjacency(u, v) != 0.0) edges.emplace_back(u, v);
        }
    }
    return edges;
}

int triple_edge_count(const AttributedGraph& g, int a, int b, int c) {
    return (g.adjacency(a, b) != 0.0) + (g.adjacency(a, c) != 0.0) +
           (g.adjacency(b, c) != 0.0);
}

} // namespace

TaskSet build_node_task(const AttributedGraph& g, const std::vector<int>& labels,
                        const SplitFractions& fractions, std::uint64_t seed) {
    require(static_cast<int>(labels.size()) == g.n(), "one label per node required");
    check_fractions(fractions);
    TaskSet task;
    task.arity = 1;
    task.seed = seed;
    task.scheme = "node";
    task.class_count = 1 + *std::max_element(labels.begin(), labels.end());

    std::vector<int> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);
    const auto sizes = split_sizes(g.n(), fractions);
    for (int rank = 0; rank < g.n(); ++rank) {
        const int v = order[static_cast<std::size_t>(rank)];
        task.instances.push_back(TaskInstance{VertexSubset({v}),
                                              labels[static_cast<std::size_t>(v)],
                                              split_of_rank(rank, sizes)});
    }
    return task;
}

TaskSet build_node_task_counts(const AttributedGraph& g, const std::vector<int>& labels,
                               int train_n, int val_n, int test_n, std::uint64_t seed) {
    require(static_cast<int>(labels.size()) == g.n(), "one label per node required");
    require(train_n >= 0 && val_n >= 0 && test_n >= 0 &&
                train_n + val_n + test_n <= g.n(),
            "split counts must fit the node count");
    TaskSet task;
    task.arity = 1;
    task.seed = seed;
    task.scheme = "node";
    task.class_count = 1 + *std::max_element(labels.begin(), labels.end());

    std::vector<int> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);
    const std::array<int, 3> sizes{train_n, val_n, test_n};
    for (int rank = 0; rank < train_n + val_n + test_n; ++rank) {
        const int v = order[static_cast<std::size_t>(rank)];
        task.instances.push_back(TaskInstance{VertexSubset({v}),
                                              labels[static_cast<std::size_t>(v)],
                                              split_of_rank(rank, sizes)});
    }
    return task;
}

TaskSet build_link_task(const AttributedGraph& g_in, const SplitFractions& fractions,
                        std::uint64_t seed) {
    check_fractions(fractions);
    const AttributedGraph g = g_in.directed ? symmetrized(g_in) : g_in;
    auto edges = undirected_edges(g);
    require(!edges.empty(), "link task needs at least one edge");

    TaskSet task;
    task.arity = 2;
    task.class_count = 2;
    task.seed = seed;
    task.scheme = "link";
    task.undirected_view = true;

    Rng rng(seed);
    rng.shuffle(edges);
    const auto sizes = split_sizes(static_cast<int>(edges.size()), fractions);

    std::set<std::pair<int, int>> used_negatives;
    Rng neg_rng = rng.fork(1);
    auto sample_negative = [&]() {
        const long long max_attempts =
            200LL * static_cast<long long>(edges.size()) + 10000LL;
        for (long long attempt = 0; attempt < max_attempts; ++attempt) {
            int u = neg_rng.uniform_int(0, g.n() - 1);
            int v = neg_rng.uniform_int(0, g.n() - 1);
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            if (g.adjacency(u, v) != 0.0) continue;
            if (used_negatives.count({u, v})) continue;
            used_negatives.insert({u, v});
            return std::pair<int, int>{u, v};
        }
        throw std::runtime_error(
            "link task: could not sample enough distinct non-edges (graph too dense)");
    };

    for (int rank = 0; rank < static_cast<int>(edges.size()); ++rank) {
        const Split s = split_of_rank(rank, sizes);
        const auto [u, v] = edges[static_cast<std::size_t>(rank)];
        task.instances.push_back(TaskInstance{VertexSubset({u, v}), 1, s});
        if (s != Split::train) task.holdout_edges.emplace_back(u, v);
        const auto [nu, nv] = sample_negative();
        task.instances.push_back(TaskInstance{VertexSubset({nu, nv}), 0, s});
    }
    return task;
}

TaskSet build_twin_link_task(const AttributedGraph& twin, int component_size,
                             const SplitFractions& fractions, std::uint64_t seed) {
    check_fractions(fractions);
    require(twin.n() == 2 * component_size, "twin graph must have 2 * component_size nodes");
    const AttributedGraph g = twin.directed ? symmetrized(twin) : twin;

    std::vector<std::pair<int, int>> positives;
    for (const auto& [u, v] : undirected_edges(g)) {
        if ((u < component_size) == (v < component_size)) positives.emplace_back(u, v);
    }
    require(!positives.empty(), "twin link task needs within-component edges");

    TaskSet task;
    task.arity = 2;
    task.class_count = 2;
    task.seed = seed;
    task.scheme = "twin-link";
    task.undirected_view = true;

    Rng rng(seed);
    rng.shuffle(positives);
    const auto sizes = split_sizes(static_cast<int>(positives.size()), fractions);

    std::set<std::pair<int, int>> used_negatives;
    Rng neg_rng = rng.fork(1);
    auto sample_cross_pair = [&]() {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const int u = neg_rng.uniform_int(0, component_size - 1);
            const int v = component_size + neg_rng.uniform_int(0, component_size - 1);
            if (used_negatives.count({u, v})) continue;
            used_negatives.insert({u, v});
            return std::pair<int, int>{u, v};
        }
        throw std::runtime_error("twin link task: ran out of distinct cross pairs");
    };

    // No holdout removal here: the label is component comembership itself
    // (within edges vs cross non-edges), so the adjacency is the ground
    // truth being read out, not a leak; removing test edges would also
    // destroy the twin symmetry the diagnostic depends on.
    for (int rank = 0; rank < static_cast<int>(positives.size()); ++rank) {
        const Split s = split_of_rank(rank, sizes);
        const auto [u, v] = positives[static_cast<std::size_t>(rank)];
        task.instances.push_back(TaskInstance{VertexSubset({u, v}), 1, s});
        const auto [nu, nv] = sample_cross_pair();
        task.instances.push_back(TaskInstance{VertexSubset({nu, nv}), 0, s});
    }
    return task;
}

TaskSet build_triad_task(const AttributedGraph& g_in, const SplitFractions& fractions,
                         std::uint64_t seed, const std::string& scheme, int per_class) {
    check_fractions(fractions);
    require(per_class >= 1, "per_class must be positive");
    require(scheme == "joint-flip", "unknown triad corruption scheme: " + scheme);
    const AttributedGraph g = g_in.directed ? symmetrized(g_in) : g_in;
    require(g.n() >= 3, "triad task needs at least three nodes");

    Rng rng(seed);
    const auto edges = undirected_edges(g);

    // Stratified triple pools, one per true-edge-count class.
    std::array<std::vector<std::array<int, 3>>, 4> pools;
    std::array<std::set<std::array<int, 3>>, 4> seen;
    auto offer = [&](int a, int b, int c) {
        std::array<int, 3> t{a, b, c};
        std::sort(t.begin(), t.end());
        if (t[0] == t[1] || t[1] == t[2]) return;
        const int count = triple_edge_count(g, t[0], t[1], t[2]);
        auto& pool = pools[static_cast<std::size_t>(count)];
        if (static_cast<int>(pool.size()) >= per_class) return;
        if (!seen[static_cast<std::size_t>(count)].insert(t).second) return;
        pool.push_back(t);
    };

    auto filled = [&]() {
        return std::all_of(pools.begin(), pools.end(), [&](const auto& p) {
            return static_cast<int>(p.size()) >= per_class;
        });
    };

    // Random triples fill the sparse classes cheaply.
    Rng triple_rng = rng.fork(1);
    for (long long attempt = 0; attempt < 4000LL * per_class && !filled(); ++attempt) {
        offer(triple_rng.uniform_int(0, g.n() - 1), triple_rng.uniform_int(0, g.n() - 1),
              triple_rng.uniform_int(0, g.n() - 1));
    }
    // Edge-seeded proposals reach the edge-heavy classes on sparse graphs.
    if (!filled() && !edges.empty()) {
        Rng edge_rng = rng.fork(2);
        for (long long attempt = 0; attempt < 8000LL * per_class && !filled(); ++attempt) {
            const auto [u, v] = edges[static_cast<std::size_t>(
                edge_rng.uniform_int(0, static_cast<int>(edges.size()) - 1))];
            offer(u, v, edge_rng.uniform_int(0, g.n() - 1));
        }
        // Triangles by common-neighbor scan when random probing is hopeless.
        for (const auto& [u, v] : edges) {
            if (static_cast<int>(pools[3].size()) >= per_class) break;
            for (int w = 0; w < g.n(); ++w) {
                if (w == u || w == v) continue;
                if (g.adjacency(u, w) != 0.0 && g.adjacency(v, w) != 0.0) offer(u, v, w);
            }
        }
    }
    for (int c = 0; c < 4; ++c) {
        if (static_cast<int>(pools[static_cast<std::size_t>(c)].size()) < per_class) {
            throw std::runtime_error("triad task: class " + std::to_string(c) +
                                     " (true edge count) is starved; only " +
                                     std::to_string(pools[static_cast<std::size_t>(c)].size()) +
                                     " of " + std::to_string(per_class) + " triples found");
        }
    }

    TaskSet task;
    task.arity = 3;
    task.class_count = 4;
    task.seed = seed;
    task.scheme = scheme;
    task.undirected_view = true;

    const auto sizes = split_sizes(per_class, fractions);
    Rng corrupt_rng = rng.fork(3);
    for (int c = 0; c < 4; ++c) {
        auto& pool = pools[static_cast<std::size_t>(c)];
        Rng shuffle_rng = rng.fork(16 + static_cast<std::uint64_t>(c));
        shuffle_rng.shuffle(pool);
        for (int rank = 0; rank < per_class; ++rank) {
            const auto& t = pool[static_cast<std::size_t>(rank)];
            task.instances.push_back(TaskInstance{VertexSubset({t[0], t[1], t[2]}), c,
                                                  split_of_rank(rank, sizes)});
            // Jointly corrupted pattern: one draw of c_flips couples the
            // three pair slots.
            const int flips = corrupt_rng.uniform_int(0, 3);
            std::array<std::pair<int, int>, 3> slots{
                std::pair<int, int>{t[0], t[1]}, {t[0], t[2]}, {t[1], t[2]}};
            std::vector<int> slot_ids{0, 1, 2};
            corrupt_rng.shuffle(slot_ids);
            for (int f = 0; f < flips; ++f) {
                const auto [a, b] = slots[static_cast<std::size_t>(
                    slot_ids[static_cast<std::size_t>(f)])];
                const double flipped = g.adjacency(a, b) != 0.0 ? 0.0 : 1.0;
                task.corruptions.emplace_back(a, b, flipped);
            }
        }
    }
    return task;
}

double micro_f1(const std::vector<int>& predictions, const std::vector<int>& truth) {
    require(!truth.empty(), "micro_f1 needs at least one instance");
    require(predictions.size() == truth.size(), "prediction/truth length mismatch");
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predictions[i] == truth[i]) {
            ++tp;
        } else {
            ++fp; // wrong prediction counts against the predicted class...
            ++fn; // ...and as a miss for the true class
        }
    }
    const double denom = static_cast<double>(tp) + static_cast<double>(fp + fn) / 2.0;
    return denom == 0.0 ? 0.0 : static_cast<double>(tp) / denom;
}

AttributedGraph sampler_graph(const AttributedGraph& g_in, const TaskSet& task) {
    AttributedGraph g = task.undirected_view && g_in.directed ? symmetrized(g_in) : g_in;
    Matrix adj = g.adjacency;
    for (const auto& [u, v] : task.holdout_edges) {
        adj(u, v) = 0.0;
        if (!g.directed) adj(v, u) = 0.0;
    }
    for (const auto& [u, v, value] : task.corruptions) {
        adj(u, v) = value;
        if (!g.directed) adj(v, u) = value;
    }
    return AttributedGraph{std::move(adj), g.node_features, g.directed};
}

void write_task_csv(const std::string& path, const TaskSet& task) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "# seed: " << task.seed << '\n';
    out << "# scheme: " << task.scheme << '\n';
    out << "# arity: " << task.arity << '\n';
    out << "# class_count: " << task.class_count << '\n';
    out << "# undirected_view: " << (task.undirected_view ? 1 : 0) << '\n';
    for (const auto& [u, v] : task.holdout_edges) {
        out << "# holdout: " << u << ' ' << v << '\n';
    }
    out.precision(17);
    for (const auto& [u, v, value] : task.corruptions) {
        out << "# corrupt: " << u << ' ' << v << ' ' << value << '\n';
    }
    for (const auto& inst : task.instances) {
        out << split_name(inst.split) << ',' << inst.label;
        for (int v : inst.subset.nodes()) out << ',' << v;
        out << '\n';
    }
}

TaskSet read_task_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    TaskSet task;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "seed:") ss >> task.seed;
            else if (key == "scheme:") ss >> task.scheme;
            else if (key == "arity:") ss >> task.arity;
            else if (key == "class_count:") ss >> task.class_count;
            else if (key == "undirected_view:") {
                int flag = 0;
                ss >> flag;
                task.undirected_view = flag != 0;
            } else if (key == "holdout:") {
                int u = 0, v = 0;
                ss >> u >> v;
                task.holdout_edges.emplace_back(u, v);
            } else if (key == "corrupt:") {
                int u = 0, v = 0;
                double value = 0.0;
                ss >> u >> v >> value;
                task.corruptions.emplace_back(u, v, value);
            }
            continue;
        }
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const Split split = split_from_name(cell);
        std::getline(ss, cell, ',');
        const int label = std::stoi(cell);
        std::vector<int> nodes;
        while (std::getline(ss, cell, ',')) nodes.push_back(std::stoi(cell));
        task.instances.push_back(TaskInstance{VertexSubset(nodes), label, split});
    }
    return task;
}

} // namespace mcstruct
