#include "mcstruct/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace mcstruct {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<int> parse_int_list(const std::string& value) {
    std::vector<int> out;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(std::stoi(trim(item)));
    }
    if (out.empty()) throw std::runtime_error("expected a comma-separated integer list");
    return out;
}

} // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    RunConfig config;
    std::string section = "run";
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected `key = value`");
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "graph.preset") config.graph_preset = value;
        else if (key == "graph.path") config.graph_path = value;
        else if (key == "graph.content") config.content_path = value;
        else if (key == "graph.cites") config.cites_path = value;
        else if (key == "graph.directed") config.graph_directed = value == "true" || value == "1";
        else if (key == "sampler.id") config.sampler.id = value;
        else if (key == "sampler.d") config.sampler.d = std::stoi(value);
        else if (key == "sampler.sweeps") config.sampler.sweeps = std::stoi(value);
        else if (key == "sampler.tol") config.sampler.tol = std::stod(value);
        else if (key == "sampler.max_steps") config.sampler.max_steps = std::stoi(value);
        else if (key == "sampler.cgnn_checkpoint") config.cgnn_checkpoint = value;
        else if (key == "cgnn.sweeps") config.cgnn.sweeps = std::stoi(value);
        else if (key == "cgnn.epochs") config.cgnn.epochs = std::stoi(value);
        else if (key == "cgnn.lr") config.cgnn.lr = std::stod(value);
        else if (key == "cgnn.neg_ratio") config.cgnn.neg_ratio = std::stoi(value);
        else if (key == "cgnn.hidden") config.cgnn.hidden = std::stoi(value);
        else if (key == "task.kind") config.task_kind = value;
        else if (key == "task.train_fraction") config.fractions.train = std::stod(value);
        else if (key == "task.val_fraction") config.fractions.val = std::stod(value);
        else if (key == "task.test_fraction") config.fractions.test = std::stod(value);
        else if (key == "task.triad_per_class") config.triad_per_class = std::stoi(value);
        else if (key == "task.node_train_count") config.node_train_count = std::stoi(value);
        else if (key == "task.node_val_count") config.node_val_count = std::stoi(value);
        else if (key == "task.node_test_count") config.node_test_count = std::stoi(value);
        else if (key == "task.labels") config.labels_path = value;
        else if (key == "readout.hidden") config.readout.hidden = std::stoi(value);
        else if (key == "readout.repr_dim") config.readout.repr_dim = std::stoi(value);
        else if (key == "readout.epochs") config.readout.epochs = std::stoi(value);
        else if (key == "readout.lr") config.readout.lr = std::stod(value);
        else if (key == "readout.batch") config.readout.batch = std::stoi(value);
        else if (key == "run.runs") config.runs = std::stoi(value);
        else if (key == "run.m_test") config.m_test = parse_int_list(value);
        else if (key == "run.seed") config.seed = std::stoull(value);
        else if (key == "run.out") config.out_dir = value;
        else if (key == "run.threads") config.threads = std::stoi(value);
        else {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": unknown config key `" + key + "`");
        }
    }
    for (int m : config.m_test) {
        if (m < 1) throw std::runtime_error("m_test entries must be >= 1");
    }
    return config;
}

void save_config(const std::string& path, const RunConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "[graph]\n";
    out << "preset = " << config.graph_preset << '\n';
    out << "path = " << config.graph_path << '\n';
    out << "content = " << config.content_path << '\n';
    out << "cites = " << config.cites_path << '\n';
    out << "directed = " << (config.graph_directed ? "true" : "false") << '\n';
    out << "\n[sampler]\n";
    out << "id = " << config.sampler.id << '\n';
    out << "d = " << config.sampler.d << '\n';
    out << "sweeps = " << config.sampler.sweeps << '\n';
    out << "tol = " << config.sampler.tol << '\n';
    out << "max_steps = " << config.sampler.max_steps << '\n';
    out << "cgnn_checkpoint = " << config.cgnn_checkpoint << '\n';
    out << "\n[cgnn]\n";
    out << "sweeps = " << config.cgnn.sweeps << '\n';
    out << "epochs = " << config.cgnn.epochs << '\n';
    out << "lr = " << config.cgnn.lr << '\n';
    out << "neg_ratio = " << config.cgnn.neg_ratio << '\n';
    out << "hidden = " << config.cgnn.hidden << '\n';
    out << "\n[task]\n";
    out << "kind = " << config.task_kind << '\n';
    out << "train_fraction = " << config.fractions.train << '\n';
    out << "val_fraction = " << config.fractions.val << '\n';
    out << "test_fraction = " << config.fractions.test << '\n';
    out << "triad_per_class = " << config.triad_per_class << '\n';
    out << "node_train_count = " << config.node_train_count << '\n';
    out << "node_val_count = " << config.node_val_count << '\n';
    out << "node_test_count = " << config.node_test_count << '\n';
    out << "labels = " << config.labels_path << '\n';
    out << "\n[readout]\n";
    out << "hidden = " << config.readout.hidden << '\n';
    out << "repr_dim = " << config.readout.repr_dim << '\n';
    out << "epochs = " << config.readout.epochs << '\n';
    out << "lr = " << config.readout.lr << '\n';
    out << "batch = " << config.readout.batch << '\n';
    out << "\n[run]\n";
    out << "runs = " << config.runs << '\n';
    out << "m_test = ";
    for (std::size_t i = 0; i < config.m_test.size(); ++i) {
        if (i) out << ',';
        out << config.m_test[i];
    }
    out << '\n';
    out << "seed = " << config.seed << '\n';
    out << "out = " << config.out_dir << '\n';
    out << "threads = " << config.threads << '\n';
}

int effective_threads(const RunConfig& config) {
    if (config.threads > 0) return config.threads;
    if (const char* env = std::getenv("MCSTRUCT_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

} // namespace mcstruct
