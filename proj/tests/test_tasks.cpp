#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcstruct/presets.hpp"
#include "mcstruct/tasks.hpp"

#include <cstdio>
#include <map>
#include <set>

using namespace mcstruct;

namespace {

std::set<std::vector<int>> subsets_of_split(const TaskSet& task, Split split) {
    std::set<std::vector<int>> out;
    for (const auto& inst : task.instances) {
        if (inst.split == split) out.insert(inst.subset.nodes());
    }
    return out;
}

void check_split_disjointness(const TaskSet& task) {
    const auto train = subsets_of_split(task, Split::train);
    const auto val = subsets_of_split(task, Split::val);
    const auto test = subsets_of_split(task, Split::test);
    for (const auto& s : val) {
        CHECK(train.count(s) == 0);
        CHECK(test.count(s) == 0);
    }
    for (const auto& s : test) CHECK(train.count(s) == 0);
}

bool same_task(const TaskSet& a, const TaskSet& b) {
    if (a.instances.size() != b.instances.size()) return false;
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
        if (!(a.instances[i].subset == b.instances[i].subset) ||
            a.instances[i].label != b.instances[i].label ||
            a.instances[i].split != b.instances[i].split) {
            return false;
        }
    }
    return a.holdout_edges == b.holdout_edges && a.corruptions == b.corruptions;
}

} // namespace

TEST_CASE("micro_f1: hand-checked cases") {
    CHECK(micro_f1({0, 1, 2}, {0, 1, 2}) == 1.0);
    CHECK(micro_f1({1, 0, 1, 0}, {0, 1, 0, 1}) == 0.0);
    // truth [0,0,1,2], preds [0,1,1,1]: TP=2 of 4.
    CHECK(micro_f1({0, 1, 1, 1}, {0, 0, 1, 2}) == 0.5);
    CHECK_THROWS_AS(micro_f1({0}, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(micro_f1({}, {}), std::invalid_argument);
}

TEST_CASE("micro_f1 equals accuracy for single-label predictions") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + rng.uniform_int(1, 40);
        const int classes = 2 + rng.uniform_int(0, 5);
        std::vector<int> truth, preds;
        int correct = 0;
        for (int i = 0; i < n; ++i) {
            truth.push_back(rng.uniform_int(0, classes - 1));
            preds.push_back(rng.uniform_int(0, classes - 1));
            if (truth.back() == preds.back()) ++correct;
        }
        CHECK(micro_f1(preds, truth) ==
              doctest::Approx(static_cast<double>(correct) / n).epsilon(1e-12));
    }
}

TEST_CASE("uniform guessing lands near 1/classes") {
    Rng rng(99);
    for (int classes : {2, 4, 7}) {
        std::vector<int> truth, preds;
        for (int i = 0; i < 2000; ++i) {
            truth.push_back(rng.uniform_int(0, classes - 1));
            preds.push_back(rng.uniform_int(0, classes - 1));
        }
        CHECK(std::abs(micro_f1(preds, truth) - 1.0 / classes) < 0.05);
    }
}

TEST_CASE("node task: fractions and explicit counts") {
    Rng rng(4);
    const auto g = erdos_renyi(40, 0.2, rng);
    std::vector<int> labels;
    for (int v = 0; v < 40; ++v) labels.push_back(v % 3);

    const auto task = build_node_task(g, labels, SplitFractions{}, 11);
    CHECK(task.instances.size() == 40);
    CHECK(task.class_count == 3);
    CHECK(task.split_instances(Split::train).size() == 24);
    CHECK(task.split_instances(Split::val).size() == 8);
    CHECK(task.split_instances(Split::test).size() == 8);
    check_split_disjointness(task);

    const auto counted = build_node_task_counts(g, labels, 20, 5, 10, 11);
    CHECK(counted.split_instances(Split::train).size() == 20);
    CHECK(counted.split_instances(Split::val).size() == 5);
    CHECK(counted.split_instances(Split::test).size() == 10);
    CHECK(counted.instances.size() == 35); // leftovers stay unassigned

    // Labels ride along unchanged.
    for (const auto& inst : task.instances) {
        CHECK(inst.label == labels[static_cast<std::size_t>(inst.subset[0])]);
    }
    CHECK_THROWS_AS(build_node_task_counts(g, labels, 30, 10, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_node_task(g, {0, 1}, SplitFractions{}, 1),
                    std::invalid_argument);
}

TEST_CASE("link task: balance, purity, determinism, holdouts") {
    Rng rng(5);
    const auto g = erdos_renyi(20, 0.3, rng);
    const auto task = build_link_task(g, SplitFractions{}, 77);
    CHECK(task.arity == 2);
    check_split_disjointness(task);

    for (Split split : {Split::train, Split::val, Split::test}) {
        int pos = 0, neg = 0;
        for (const auto& inst : task.split_instances(split)) {
            inst.label == 1 ? ++pos : ++neg;
        }
        CHECK(pos == neg); // exactly balanced per split
    }
    // Negatives are never true edges.
    for (const auto& inst : task.instances) {
        if (inst.label == 0) {
            CHECK(g.adjacency(inst.subset[0], inst.subset[1]) == 0.0);
        }
    }
    // Holdouts are exactly the val/test positives.
    std::size_t expected_holdouts = 0;
    for (const auto& inst : task.instances) {
        if (inst.label == 1 && inst.split != Split::train) ++expected_holdouts;
    }
    CHECK(task.holdout_edges.size() == expected_holdouts);

    // Pure function of (g, fractions, seed).
    CHECK(same_task(task, build_link_task(g, SplitFractions{}, 77)));
    CHECK_FALSE(same_task(task, build_link_task(g, SplitFractions{}, 78)));

    // A complete graph has no negatives to sample.
    Matrix full = Matrix::Ones(6, 6);
    full.diagonal().setZero();
    CHECK_THROWS_AS(build_link_task(make_graph(full), SplitFractions{}, 1),
                    std::runtime_error);
}

TEST_CASE("sampler_graph removes holdout edges") {
    Rng rng(6);
    const auto g = erdos_renyi(16, 0.3, rng);
    const auto task = build_link_task(g, SplitFractions{}, 3);
    const auto visible = sampler_graph(g, task);
    for (const auto& [u, v] : task.holdout_edges) {
        CHECK(g.adjacency(u, v) == 1.0);
        CHECK(visible.adjacency(u, v) == 0.0);
        CHECK(visible.adjacency(v, u) == 0.0);
    }
    // Training positives stay visible.
    for (const auto& inst : task.split_instances(Split::train)) {
        if (inst.label == 1) {
            CHECK(visible.adjacency(inst.subset[0], inst.subset[1]) == 1.0);
        }
    }
}

TEST_CASE("twin link task: within-component positives, cross negatives") {
    const auto g = symmetrized(twin_food_web().graph);
    const auto task = build_twin_link_task(g, 6, SplitFractions{}, 9);
    check_split_disjointness(task);
    for (const auto& inst : task.instances) {
        const bool same_component = (inst.subset[0] < 6) == (inst.subset[1] < 6);
        if (inst.label == 1) {
            CHECK(same_component);
            CHECK(g.adjacency(inst.subset[0], inst.subset[1]) == 1.0);
        } else {
            CHECK_FALSE(same_component);
            CHECK(g.adjacency(inst.subset[0], inst.subset[1]) == 0.0);
        }
    }
    for (Split split : {Split::train, Split::val, Split::test}) {
        int pos = 0, neg = 0;
        for (const auto& inst : task.split_instances(split)) {
            inst.label == 1 ? ++pos : ++neg;
        }
        CHECK(pos == neg);
    }
}

TEST_CASE("triad task: labels are true counts, balance within one, corruption recorded") {
    Rng rng(13);
    const auto g = planted_two_block(24, 0.55, 0.1, rng);
    const auto task = build_triad_task(g, SplitFractions{}, 21, "joint-flip", 12);
    CHECK(task.arity == 3);
    CHECK(task.class_count == 4);
    check_split_disjointness(task);

    for (const auto& inst : task.instances) {
        const int a = inst.subset[0], b = inst.subset[1], c = inst.subset[2];
        const int count = (g.adjacency(a, b) != 0.0) + (g.adjacency(a, c) != 0.0) +
                          (g.adjacency(b, c) != 0.0);
        CHECK(inst.label == count);
    }
    for (Split split : {Split::train, Split::val, Split::test}) {
        std::map<int, int> per_class;
        for (const auto& inst : task.split_instances(split)) ++per_class[inst.label];
        int lo = 1 << 30, hi = 0;
        for (const auto& [label, count] : per_class) {
            lo = std::min(lo, count);
            hi = std::max(hi, count);
        }
        CHECK(per_class.size() == 4);
        CHECK(hi - lo <= 1);
    }

    // Corruptions flip pair slots of sampled triples in the visible graph.
    const auto visible = sampler_graph(g, task);
    std::size_t applied = 0;
    for (const auto& [u, v, value] : task.corruptions) {
        if (visible.adjacency(u, v) == value) ++applied;
    }
    // Later overrides may rewrite earlier ones; nearly all must hold.
    CHECK(applied >= task.corruptions.size() * 9 / 10);
    CHECK_FALSE(task.corruptions.empty());

    // Determinism.
    CHECK(same_task(task, build_triad_task(g, SplitFractions{}, 21, "joint-flip", 12)));
}

TEST_CASE("triad task reports the starved class") {
    // One triangle plus isolated nodes: no triple can realize exactly two
    // edges, so class 2 is starved.
    Matrix adj = Matrix::Zero(6, 6);
    adj(0, 1) = adj(1, 0) = adj(1, 2) = adj(2, 1) = adj(0, 2) = adj(2, 0) = 1.0;
    const auto g = make_graph(adj);
    CHECK_THROWS_WITH_AS(build_triad_task(g, SplitFractions{}, 1, "joint-flip", 3),
                         doctest::Contains("class 2"), std::runtime_error);
}

TEST_CASE("task CSV round trip") {
    Rng rng(31);
    const auto g = erdos_renyi(14, 0.35, rng);
    const auto task = build_link_task(g, SplitFractions{}, 5);
    const std::string path = "task_roundtrip.csv";
    write_task_csv(path, task);
    const auto loaded = read_task_csv(path);
    CHECK(same_task(task, loaded));
    CHECK(loaded.arity == task.arity);
    CHECK(loaded.class_count == task.class_count);
    CHECK(loaded.seed == task.seed);
    CHECK(loaded.scheme == task.scheme);
    CHECK(loaded.undirected_view == task.undirected_view);
    std::remove(path.c_str());

    Rng rng2(32);
    const auto g2 = planted_two_block(24, 0.55, 0.1, rng2);
    const auto triad = build_triad_task(g2, SplitFractions{}, 2, "joint-flip", 8);
    write_task_csv(path, triad);
    CHECK(same_task(triad, read_task_csv(path)));
    std::remove(path.c_str());
}
