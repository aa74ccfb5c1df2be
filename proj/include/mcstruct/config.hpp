#ifndef MCSTRUCT_CONFIG_HPP
#define MCSTRUCT_CONFIG_HPP

#include "mcstruct/samplers.hpp"
#include "mcstruct/structural.hpp"
#include "mcstruct/tasks.hpp"

#include <string>
#include <vector>

namespace mcstruct {

/// Experiment configuration. Every field has a default; a config file is a
/// flat `key = value` text format grouped by `[section]` headers and
/// overrides only what it names. Unknown keys are an error.
struct RunConfig {
    // [graph]
    std::string graph_preset = "twin-foodweb";
    std::string graph_path;   // edge-list file; overrides the preset
    std::string content_path; // citation dataset; overrides both
    std::string cites_path;
    bool graph_directed = false;

    // [sampler]
    SamplerSpec sampler; // id=mc-svd, d=32, sweeps=3, tol, max_steps
    std::string cgnn_checkpoint;

    // [cgnn] training hyperparameters (used when sampler.id == "cgnn"
    // and no checkpoint is given)
    CgnnHyper cgnn;

    // [task]
    std::string task_kind = "link"; // node | link | twin-link | triad
    SplitFractions fractions;
    int triad_per_class = 40;
    int node_train_count = -1, node_val_count = -1, node_test_count = -1;
    std::string labels_path; // per-node labels for node tasks on label-less graphs

    // [readout]
    ReadoutHyper readout;

    // [run]
    int runs = 12;
    std::vector<int> m_test = {1, 5, 20};
    std::uint64_t seed = 7;
    std::string out_dir = "out";
    int threads = 0; // 0: decide from MCSTRUCT_THREADS / hardware
};

RunConfig default_config();

/// Parses a config file over the defaults. Missing file or unknown keys
/// raise std::runtime_error.
RunConfig load_config(const std::string& path);

/// Writes the full effective configuration (all fields, not only
/// overridden ones).
void save_config(const std::string& path, const RunConfig& config);

/// Worker count: config.threads when positive, otherwise the
/// MCSTRUCT_THREADS environment variable, otherwise 1.
int effective_threads(const RunConfig& config);

} // namespace mcstruct

#endif
