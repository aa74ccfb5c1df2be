#include "mcstruct/experiment.hpp"

#include "mcstruct/presets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace mcstruct {

namespace {

std::vector<int> load_labels_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    std::vector<int> labels;
    int value = 0;
    while (in >> value) labels.push_back(value);
    if (static_cast<int>(labels.size()) != n) {
        throw std::runtime_error("labels file " + path + " has " +
                                 std::to_string(labels.size()) + " entries for " +
                                 std::to_string(n) + " nodes");
    }
    return labels;
}

TaskSet build_configured_task(const RunConfig& config, const LoadedGraph& loaded,
                              std::uint64_t task_seed) {
    const AttributedGraph& g = loaded.graph;
    if (config.task_kind == "link") {
        return build_link_task(g, config.fractions, task_seed);
    }
    if (config.task_kind == "twin-link") {
        require(g.n() % 2 == 0, "twin-link task expects a twin graph (even node count)");
        return build_twin_link_task(g, g.n() / 2, config.fractions, task_seed);
    }
    if (config.task_kind == "triad") {
        return build_triad_task(g, config.fractions, task_seed, "joint-flip",
                                config.triad_per_class);
    }
    if (config.task_kind == "node") {
        std::vector<int> labels = loaded.labels;
        if (!config.labels_path.empty()) {
            labels = load_labels_file(config.labels_path, g.n());
        }
        require(!labels.empty(), "node task needs labels (citation dataset or labels file)");
        if (config.node_train_count >= 0) {
            return build_node_task_counts(g, labels, config.node_train_count,
                                          config.node_val_count, config.node_test_count,
                                          task_seed);
        }
        return build_node_task(g, labels, config.fractions, task_seed);
    }
    throw std::runtime_error("unknown task kind: " + config.task_kind);
}

struct RunOutput {
    std::vector<ResultRow> rows;
};

RunOutput execute_run(const RunConfig& config, const LoadedGraph& loaded, int run_index) {
    const std::uint64_t run_seed =
        Rng(config.seed).substream(0x72756e00ULL + static_cast<std::uint64_t>(run_index));
    Rng run_rng(run_seed);

    const TaskSet task = build_configured_task(config, loaded, run_rng.substream(1));
    const AttributedGraph visible = sampler_graph(loaded.graph, task);

    SamplerSpec spec = config.sampler;
    if (spec.id == "cgnn" && spec.cgnn == nullptr) {
        if (!config.cgnn_checkpoint.empty()) {
            spec.cgnn = std::make_shared<CgnnParams>(load_cgnn(config.cgnn_checkpoint));
        } else {
            CgnnHyper hyper = config.cgnn;
            hyper.d = spec.d;
            hyper.seed = run_rng.substream(2);
            spec.cgnn = std::make_shared<CgnnParams>(cgnn_train(visible, hyper).params);
            spec.sweeps = hyper.sweeps;
        }
    }

    ReadoutHyper readout_hyper = config.readout;
    readout_hyper.seed = run_rng.substream(3);
    const auto trained =
        train_readout(visible, task.split_instances(Split::train), spec, readout_hyper);

    RunOutput output;
    const std::uint64_t eval_stream = run_rng.substream(0x6576616c);
    for (int m : config.m_test) {
        for (Split split : {Split::train, Split::val, Split::test}) {
            const auto instances = task.split_instances(split);
            if (instances.empty()) continue;
            const auto eval = evaluate_readout(
                trained.model, visible, spec, instances, m,
                Rng(eval_stream).substream(static_cast<std::uint64_t>(m)));
            output.rows.push_back(ResultRow{run_index, run_seed, m, split, eval.micro_f1});
        }
    }
    return output;
}

} // namespace

LoadedGraph load_configured_graph(const RunConfig& config) {
    if (!config.content_path.empty()) {
        require(!config.cites_path.empty(), "citation dataset needs both content and cites");
        return load_citation_dataset(config.content_path, config.cites_path);
    }
    if (!config.graph_path.empty()) {
        return load_edge_list(config.graph_path, config.graph_directed);
    }
    LoadedGraph loaded;
    loaded.graph = preset_graph(config.graph_preset);
    for (int i = 0; i < loaded.graph.n(); ++i) {
        loaded.index_to_id.push_back(std::to_string(i));
    }
    return loaded;
}

ExperimentResult run_experiment(const RunConfig& config, bool write_artifacts) {
    require(config.runs >= 1, "at least one run required");
    const LoadedGraph loaded = load_configured_graph(config);

    ExperimentResult result;
    const int threads = std::min(effective_threads(config), config.runs);
    if (threads <= 1) {
        for (int run = 0; run < config.runs; ++run) {
            auto out = execute_run(config, loaded, run);
            result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
        }
    } else {
        std::vector<RunOutput> outputs(static_cast<std::size_t>(config.runs));
        std::mutex next_mutex;
        int next_run = 0;
        auto worker = [&]() {
            while (true) {
                int run;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next_run >= config.runs) return;
                    run = next_run++;
                }
                outputs[static_cast<std::size_t>(run)] = execute_run(config, loaded, run);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (const auto& out : outputs) {
            result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
        }
    }

    std::sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.run, a.m_test, a.split) < std::tie(b.run, b.m_test, b.split);
    });

    // Mean and standard deviation over runs per (m_test, split).
    for (int m : config.m_test) {
        for (Split split : {Split::train, Split::val, Split::test}) {
            std::vector<double> values;
            for (const auto& row : result.rows) {
                if (row.m_test == m && row.split == split) values.push_back(row.micro_f1);
            }
            if (values.empty()) continue;
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            var = values.size() > 1 ? var / static_cast<double>(values.size() - 1) : 0.0;
            result.summaries.push_back(
                SummaryRow{m, split, mean, std::sqrt(var), static_cast<int>(values.size())});
        }
    }

    if (write_artifacts) {
        std::filesystem::create_directories(config.out_dir);
        write_results_csv(config.out_dir + "/results.csv", result);
        write_summary_csv(config.out_dir + "/summary.csv", result);
        save_config(config.out_dir + "/config.txt", config);
    }
    return result;
}

void write_results_csv(const std::string& path, const ExperimentResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    out << "run,seed,m_test,split,micro_f1\n";
    for (const auto& row : result.rows) {
        out << row.run << ',' << row.seed << ',' << row.m_test << ','
            << split_name(row.split) << ',' << row.micro_f1 << '\n';
    }
}

void write_summary_csv(const std::string& path, const ExperimentResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    out << "m_test,split,mean_micro_f1,std_micro_f1,runs\n";
    for (const auto& row : result.summaries) {
        out << row.m_test << ',' << split_name(row.split) << ',' << row.mean << ','
            << row.stddev << ',' << row.runs << '\n';
    }
}

} // namespace mcstruct
