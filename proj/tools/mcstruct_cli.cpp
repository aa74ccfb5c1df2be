// mcstruct: construct structural representations of nodes, pairs, and
// triads as Monte Carlo expectations over positional embedding samples,
// train supervised readouts on them, and check sampler equivariance.
#include <CLI11.hpp>

#include "mcstruct/config.hpp"
#include "mcstruct/diagnostics.hpp"
#include "mcstruct/experiment.hpp"
#include "mcstruct/presets.hpp"
#include "mcstruct/wl.hpp"

#include <filesystem>
#include <iostream>

using namespace mcstruct;

namespace {

// Usage-level problems (exit 2), as opposed to pipeline failures (exit 1).
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string g_stage = "startup";

RunConfig base_config(const std::string& config_path) {
    if (config_path.empty()) return default_config();
    if (!std::filesystem::exists(config_path)) {
        throw usage_error("config file does not exist: " + config_path);
    }
    return load_config(config_path);
}

// Shared graph/sampler/seed flags. Flag presence wins over config values.
struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string graph_path;
    std::string content_path, cites_path;
    bool directed = false;
    bool symmetrize = false;
    std::string sampler_id;
    int d = -1;
    int sweeps = -1;
    std::string cgnn_checkpoint;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out;

    void add_to(CLI::App* cmd, bool with_sampler = true) {
        cmd->add_option("--config", config_path, "config file (key = value sections)");
        cmd->add_option("--preset", preset, "named graph preset");
        cmd->add_option("--graph", graph_path, "edge-list file");
        cmd->add_option("--content", content_path, "citation .content file");
        cmd->add_option("--cites", cites_path, "citation .cites file");
        cmd->add_flag("--directed", directed, "treat the edge list as directed");
        cmd->add_flag("--symmetrize", symmetrize, "use the undirected view of the graph");
        if (with_sampler) {
            cmd->add_option("--sampler", sampler_id,
                            "mc-svd | mc-svd-converged | cgnn | planted-violation");
            cmd->add_option("--d", d, "embedding dimension");
            cmd->add_option("--sweeps", sweeps, "CGNN Gibbs sweeps per sample");
            cmd->add_option("--cgnn-checkpoint", cgnn_checkpoint, "trained CGNN parameters");
        }
        cmd->add_option_function<std::uint64_t>(
               "--seed",
               [this](std::uint64_t value) {
                   seed = value;
                   seed_given = true;
               },
               "base random seed");
        cmd->add_option("--out", out, "output file or directory");
    }

    RunConfig resolve() const {
        RunConfig config = base_config(config_path);
        if (!preset.empty()) config.graph_preset = preset;
        if (!graph_path.empty()) config.graph_path = graph_path;
        if (!content_path.empty()) config.content_path = content_path;
        if (!cites_path.empty()) config.cites_path = cites_path;
        if (directed) config.graph_directed = true;
        if (!sampler_id.empty()) config.sampler.id = sampler_id;
        if (d > 0) config.sampler.d = d;
        if (sweeps > 0) config.sampler.sweeps = sweeps;
        if (!cgnn_checkpoint.empty()) config.cgnn_checkpoint = cgnn_checkpoint;
        if (seed_given) config.seed = seed;
        if (!out.empty()) config.out_dir = out;
        return config;
    }

    AttributedGraph load_graph(const RunConfig& config) const {
        AttributedGraph g = load_configured_graph(config).graph;
        if (symmetrize && g.directed) g = symmetrized(g);
        return g;
    }

    SamplerSpec sampler_spec(const RunConfig& config) const {
        SamplerSpec spec = config.sampler;
        if (spec.id == "cgnn") {
            if (config.cgnn_checkpoint.empty()) {
                throw usage_error("the cgnn sampler needs --cgnn-checkpoint here");
            }
            auto params = std::make_shared<CgnnParams>(load_cgnn(config.cgnn_checkpoint));
            spec.d = params->d;
            spec.cgnn = std::move(params);
        }
        return spec;
    }
};

void print_orbits(const AttributedGraph& g, int k) {
    if (g.n() <= kBruteForceNodeLimit) {
        const auto part = k == 1 ? node_orbits(g) : joint_orbits(g, k);
        std::cout << "exact orbits (arity " << part.arity << "), " << part.classes.size()
                  << " classes\n";
        for (std::size_t c = 0; c < part.classes.size(); ++c) {
            std::cout << "class " << c << ":";
            for (const auto& subset : part.classes[c]) {
                std::cout << " {";
                for (std::size_t i = 0; i < subset.nodes().size(); ++i) {
                    if (i) std::cout << ',';
                    std::cout << subset.nodes()[i];
                }
                std::cout << '}';
            }
            std::cout << '\n';
        }
        return;
    }
    if (k != 1) {
        throw usage_error("joint orbits need n <= 10; this graph is larger");
    }
    std::cout << "1-WL refinement partition (upper bound on orbits, not ground truth)\n";
    const auto classes = wl_partition(g);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::cout << "class " << c << ":";
        for (int v : classes[c]) std::cout << ' ' << v;
        std::cout << '\n';
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Monte Carlo structural representations from positional node embeddings"};
    app.require_subcommand(1);

    auto* orbits_cmd = app.add_subcommand("orbits", "print automorphism orbit classes");
    auto orbits_flags = std::make_shared<CommonFlags>();
    auto orbits_k = std::make_shared<int>(1);
    orbits_flags->add_to(orbits_cmd, false);
    orbits_cmd->add_option("--k", *orbits_k, "subset arity (default 1 = node orbits)");
    orbits_cmd->callback([orbits_flags, orbits_k]() {
        g_stage = "orbits";
        const RunConfig config = orbits_flags->resolve();
        print_orbits(orbits_flags->load_graph(config), *orbits_k);
    });

    auto* sample_cmd = app.add_subcommand("sample", "draw one embedding sample to CSV");
    auto sample_flags = std::make_shared<CommonFlags>();
    sample_flags->add_to(sample_cmd);
    sample_cmd->callback([sample_flags]() {
        g_stage = "sample";
        const RunConfig config = sample_flags->resolve();
        const auto g = sample_flags->load_graph(config);
        const auto spec = sample_flags->sampler_spec(config);
        const std::string path = sample_flags->out.empty() ? "embedding.csv"
                                                           : sample_flags->out;
        write_embedding(path, draw_sample(g, spec, config.seed));
        std::cout << "wrote " << path << " and " << path << ".prov\n";
    });

    auto* cgnn_cmd = app.add_subcommand("train-cgnn", "train the CGNN sampler");
    auto cgnn_flags = std::make_shared<CommonFlags>();
    cgnn_flags->add_to(cgnn_cmd);
    auto cgnn_epochs = std::make_shared<int>(-1);
    cgnn_cmd->add_option("--epochs", *cgnn_epochs, "training epochs");
    cgnn_cmd->callback([cgnn_flags, cgnn_epochs]() {
        g_stage = "train-cgnn";
        const RunConfig config = cgnn_flags->resolve();
        const auto g = cgnn_flags->load_graph(config);
        CgnnHyper hyper = config.cgnn;
        hyper.d = config.sampler.d;
        hyper.seed = config.seed;
        if (*cgnn_epochs >= 0) hyper.epochs = *cgnn_epochs;
        if (cgnn_flags->sweeps > 0) hyper.sweeps = cgnn_flags->sweeps;
        const auto result = cgnn_train(g, hyper);
        const std::string path = cgnn_flags->out.empty() ? "cgnn.csv" : cgnn_flags->out;
        save_cgnn(path, result.params);
        std::cout << "wrote " << path << '\n';
        if (!result.loss_curve.empty()) {
            std::cout << "loss " << result.loss_curve.front() << " -> "
                      << result.loss_curve.back() << " over " << result.loss_curve.size()
                      << " epochs\n";
        }
    });

    auto* task_cmd = app.add_subcommand("make-task", "build a labeled task CSV");
    auto task_flags = std::make_shared<CommonFlags>();
    task_flags->add_to(task_cmd, false);
    auto task_kind = std::make_shared<std::string>();
    task_cmd->add_option("--kind", *task_kind, "node | link | twin-link | triad");
    task_cmd->callback([task_flags, task_kind]() {
        g_stage = "make-task";
        RunConfig config = task_flags->resolve();
        if (!task_kind->empty()) config.task_kind = *task_kind;
        const LoadedGraph loaded = load_configured_graph(config);
        TaskSet task;
        if (config.task_kind == "link") {
            task = build_link_task(loaded.graph, config.fractions, config.seed);
        } else if (config.task_kind == "twin-link") {
            task = build_twin_link_task(loaded.graph, loaded.graph.n() / 2,
                                        config.fractions, config.seed);
        } else if (config.task_kind == "triad") {
            task = build_triad_task(loaded.graph, config.fractions, config.seed,
                                    "joint-flip", config.triad_per_class);
        } else if (config.task_kind == "node") {
            if (loaded.labels.empty()) {
                throw usage_error("node tasks need a citation dataset or labels file");
            }
            task = build_node_task(loaded.graph, loaded.labels, config.fractions,
                                   config.seed);
        } else {
            throw usage_error("unknown task kind: " + config.task_kind);
        }
        const std::string path = task_flags->out.empty() ? "task.csv" : task_flags->out;
        write_task_csv(path, task);
        std::cout << "wrote " << path << " (" << task.instances.size() << " instances)\n";
    });

    auto* readout_cmd = app.add_subcommand("train-readout", "train a readout on a task");
    auto readout_flags = std::make_shared<CommonFlags>();
    readout_flags->add_to(readout_cmd);
    auto readout_task_path = std::make_shared<std::string>();
    auto readout_epochs = std::make_shared<int>(-1);
    readout_cmd->add_option("--task", *readout_task_path, "task CSV")->required();
    readout_cmd->add_option("--epochs", *readout_epochs, "training epochs");
    readout_cmd->callback([readout_flags, readout_task_path, readout_epochs]() {
        g_stage = "train-readout";
        const RunConfig config = readout_flags->resolve();
        const TaskSet task = read_task_csv(*readout_task_path);
        const auto visible = sampler_graph(readout_flags->load_graph(config), task);
        const auto spec = readout_flags->sampler_spec(config);
        ReadoutHyper hyper = config.readout;
        hyper.seed = config.seed;
        if (*readout_epochs >= 0) hyper.epochs = *readout_epochs;
        const auto result =
            train_readout(visible, task.split_instances(Split::train), spec, hyper);
        const std::string path = readout_flags->out.empty() ? "readout.csv"
                                                            : readout_flags->out;
        save_readout(path, result.model);
        std::cout << "wrote " << path << '\n';
        if (!result.loss_curve.empty()) {
            std::cout << "loss " << result.loss_curve.front() << " -> "
                      << result.loss_curve.back() << '\n';
        }
    });

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained readout");
    auto eval_flags = std::make_shared<CommonFlags>();
    eval_flags->add_to(eval_cmd);
    auto eval_task_path = std::make_shared<std::string>();
    auto eval_model_path = std::make_shared<std::string>();
    auto eval_m_test = std::make_shared<std::vector<int>>();
    eval_cmd->add_option("--task", *eval_task_path, "task CSV")->required();
    eval_cmd->add_option("--model", *eval_model_path, "readout checkpoint")->required();
    eval_cmd->add_option("--m-test", *eval_m_test, "Monte Carlo sample counts")
        ->delimiter(',');
    eval_cmd->callback([eval_flags, eval_task_path, eval_model_path, eval_m_test]() {
        g_stage = "eval";
        const RunConfig config = eval_flags->resolve();
        const TaskSet task = read_task_csv(*eval_task_path);
        const auto visible = sampler_graph(eval_flags->load_graph(config), task);
        const auto spec = eval_flags->sampler_spec(config);
        const auto model = load_readout(*eval_model_path);
        const auto m_values = eval_m_test->empty() ? config.m_test : *eval_m_test;
        std::cout << "m_test,split,micro_f1\n";
        for (int m : m_values) {
            for (Split split : {Split::train, Split::val, Split::test}) {
                const auto instances = task.split_instances(split);
                if (instances.empty()) continue;
                const auto eval = evaluate_readout(
                    model, visible, spec, instances, m,
                    Rng(config.seed).substream(0x6576ULL + static_cast<std::uint64_t>(m)));
                std::cout << m << ',' << split_name(split) << ',' << eval.micro_f1 << '\n';
            }
        }
    });

    auto* diag_cmd =
        app.add_subcommand("diagnose", "convergence curves and the equivariance report");
    auto diag_flags = std::make_shared<CommonFlags>();
    diag_flags->add_to(diag_cmd);
    auto diag_m_max = std::make_shared<int>(400);
    auto diag_samples = std::make_shared<int>(500);
    diag_cmd->add_option("--m-max", *diag_m_max, "largest sample count on the curves");
    diag_cmd->add_option("--equivariance-samples", *diag_samples,
                         "draws for the equivariance report");
    diag_cmd->callback([diag_flags, diag_m_max, diag_samples]() {
        g_stage = "diagnose";
        RunConfig config = diag_flags->resolve();
        // The no-flags default reproduces the twin food web figure
        // pipeline: converged MC-SVD at d=4 on the undirected view.
        if (diag_flags->sampler_id.empty() && diag_flags->config_path.empty()) {
            config.sampler.id = "mc-svd-converged";
            config.sampler.d = 4;
        }
        AttributedGraph g = load_configured_graph(config).graph;
        if (g.directed) g = symmetrized(g);
        const auto spec = diag_flags->sampler_spec(config);
        const std::string dir = diag_flags->out.empty() ? "diagnostics" : diag_flags->out;
        std::filesystem::create_directories(dir);

        const bool is_twin_foodweb = config.graph_path.empty() &&
                                     config.content_path.empty() &&
                                     config.graph_preset == "twin-foodweb";
        const TwinFoodWeb preset = twin_food_web();
        const int u = is_twin_foodweb ? preset.lynx : 0;
        const int v = is_twin_foodweb ? preset.orca : g.n() - 1;
        write_curve_csv(dir + "/node_convergence.csv",
                        node_convergence(g, spec, u, v, *diag_m_max, config.seed));
        std::vector<std::pair<int, int>> pairs;
        if (is_twin_foodweb) {
            pairs = {{preset.lynx, preset.coyote},
                     {preset.orca, preset.coyote},
                     {preset.orca, preset.lynx}};
        } else {
            pairs = {{0, g.n() - 1}};
        }
        write_curve_csv(dir + "/pair_convergence.csv",
                        pair_convergence(g, spec, pairs, *diag_m_max, config.seed + 1));
        if (g.n() <= kBruteForceNodeLimit) {
            write_equivariance_csv(
                dir + "/equivariance.csv",
                equivariance_report(g, spec, *diag_samples, config.seed + 2));
        } else {
            std::cout << "equivariance report skipped: exact orbits need n <= 10\n";
        }
        std::cout << "wrote diagnostics under " << dir << '\n';
    });

    auto* run_cmd = app.add_subcommand("run", "full experiment (12-run protocol)");
    auto run_flags = std::make_shared<CommonFlags>();
    run_flags->add_to(run_cmd);
    auto run_runs = std::make_shared<int>(-1);
    auto run_m_test = std::make_shared<std::vector<int>>();
    auto run_task_kind = std::make_shared<std::string>();
    run_cmd->add_option("--runs", *run_runs, "number of independent runs");
    run_cmd->add_option("--m-test", *run_m_test, "Monte Carlo sample counts")
        ->delimiter(',');
    run_cmd->add_option("--task", *run_task_kind, "node | link | twin-link | triad");
    run_cmd->callback([run_flags, run_runs, run_m_test, run_task_kind]() {
        g_stage = "run";
        RunConfig config = run_flags->resolve();
        if (*run_runs > 0) config.runs = *run_runs;
        if (!run_m_test->empty()) config.m_test = *run_m_test;
        if (!run_task_kind->empty()) config.task_kind = *run_task_kind;
        const auto result = run_experiment(config);
        std::cout << "m_test,split,mean_micro_f1,std_micro_f1,runs\n";
        for (const auto& row : result.summaries) {
            std::cout << row.m_test << ',' << split_name(row.split) << ',' << row.mean
                      << ',' << row.stddev << ',' << row.runs << '\n';
        }
        std::cout << "artifacts under " << config.out_dir << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error[" << g_stage << "]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
