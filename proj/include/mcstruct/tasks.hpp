#ifndef MCSTRUCT_TASKS_HPP
#define MCSTRUCT_TASKS_HPP

#include "mcstruct/graph.hpp"

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace mcstruct {

enum class Split { train, val, test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

/// One labeled node subset (arity 1, 2, or 3).
struct TaskInstance {
    VertexSubset subset;
    int label = 0;
    Split split = Split::train;
};

/// A full prediction task. `holdout_edges` are positive edges that must be
/// removed from the adjacency visible to embedding samplers (link tasks);
/// `corruptions` are adjacency overrides that present corrupted triad
/// patterns to the samplers while labels keep the true counts.
struct TaskSet {
    std::vector<TaskInstance> instances;
    int arity = 1;
    int class_count = 2;
    std::uint64_t seed = 0;
    std::string scheme;
    bool undirected_view = false;
    std::vector<std::pair<int, int>> holdout_edges;
    std::vector<std::tuple<int, int, double>> corruptions;

    std::vector<TaskInstance> split_instances(Split s) const;
};

struct SplitFractions {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
};

/// Arity-1 task from per-node labels, split by seeded shuffle + fractions.
TaskSet build_node_task(const AttributedGraph& g, const std::vector<int>& labels,
                        const SplitFractions& fractions, std::uint64_t seed);

/// Arity-1 task with explicit split sizes (Cora-style fixed counts).
TaskSet build_node_task_counts(const AttributedGraph& g, const std::vector<int>& labels,
                               int train_n, int val_n, int test_n, std::uint64_t seed);

/// Balanced link prediction on the undirected view: positives are true
/// edges, negatives are uniformly sampled never-edge pairs, disjoint across
/// splits, exactly one negative per positive in every split. Validation and
/// test positives are recorded as holdout edges. Too-dense graphs (negative
/// sampling cannot finish) raise std::runtime_error.
TaskSet build_link_task(const AttributedGraph& g, const SplitFractions& fractions,
                        std::uint64_t seed);

/// Link-style task on a twin graph: positives are within-component true
/// edges, negatives are sampled across-component pairs (non-edges by
/// construction), so the label is component comembership and samplers see
/// the full graph. component_size is the node count of one component.
TaskSet build_twin_link_task(const AttributedGraph& twin, int component_size,
                             const SplitFractions& fractions, std::uint64_t seed);

/// Triad task on the undirected view: samples node triples stratified so
/// every split holds each true-edge-count class {0,1,2,3} within +-1 of the
/// others, labels them with the true count, and presents a jointly
/// corrupted pattern through adjacency overrides. The default scheme
/// "joint-flip" draws c uniform on {0..3} and flips c of the three pair
/// slots without replacement, making the flips dependent through c.
/// A class that cannot be filled raises std::runtime_error naming it.
TaskSet build_triad_task(const AttributedGraph& g, const SplitFractions& fractions,
                         std::uint64_t seed, const std::string& scheme = "joint-flip",
                         int per_class = 40);

/// Micro-averaged F1: global TP / (TP + (FP + FN) / 2) over all classes.
/// Equals plain accuracy for single-label multi-class predictions.
double micro_f1(const std::vector<int>& predictions, const std::vector<int>& truth);

/// The adjacency a sampler is allowed to see for this task: the task's view
/// of g with holdout edges removed and corruption overrides applied.
AttributedGraph sampler_graph(const AttributedGraph& g, const TaskSet& task);

// CSV `split,label,v1[,v2[,v3]]` with `# key: value` metadata headers.
void write_task_csv(const std::string& path, const TaskSet& task);
TaskSet read_task_csv(const std::string& path);

} // namespace mcstruct

#endif
