#ifndef MCSTRUCT_EXPERIMENT_HPP
#define MCSTRUCT_EXPERIMENT_HPP

#include "mcstruct/config.hpp"
#include "mcstruct/graph_io.hpp"

#include <string>
#include <vector>

namespace mcstruct {

struct ResultRow {
    int run = 0;
    std::uint64_t seed = 0;
    int m_test = 1;
    Split split = Split::test;
    double micro_f1 = 0.0;
};

struct SummaryRow {
    int m_test = 1;
    Split split = Split::test;
    double mean = 0.0;
    double stddev = 0.0;
    int runs = 0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;       // sorted by (run, m_test, split)
    std::vector<SummaryRow> summaries; // mean and std over runs
};

/// Loads the configured graph (preset, edge list, or citation files) plus
/// labels when the source provides them.
LoadedGraph load_configured_graph(const RunConfig& config);

/// Full pipeline: per run — build the task, derive the sampler-visible
/// graph, train CGNN if configured, train the readout, evaluate every split
/// at every configured m_test. Runs execute independently (possibly in
/// parallel, bounded by effective_threads) with per-run seed substreams;
/// rows are sorted before writing so outputs are order-deterministic.
/// Writes `results.csv`, `summary.csv`, and `config.txt` into
/// config.out_dir when `write_artifacts` is set.
ExperimentResult run_experiment(const RunConfig& config, bool write_artifacts = true);

void write_results_csv(const std::string& path, const ExperimentResult& result);
void write_summary_csv(const std::string& path, const ExperimentResult& result);

} // namespace mcstruct

#endif
