#include "mcstruct/presets.hpp"

#include <sstream>

namespace mcstruct {

namespace {

AttributedGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                           bool directed) {
    Matrix adj = Matrix::Zero(n, n);
    for (auto [u, v] : edges) {
        adj(u, v) = 1.0;
        if (!directed) adj(v, u) = 1.0;
    }
    return make_graph(std::move(adj), Matrix(), directed);
}

// 4-node directed graph with a trivial automorphism group.
AttributedGraph asymmetric4() {
    return from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}}, true);
}

} // namespace

AttributedGraph food_web_component() {
    // 0 plant, 1/2 grazers, 3 omnivorous mid predator (coyote analog),
    // 4 small predator, 5 top predator (lynx analog). Edge u -> v means u
    // feeds on v. The component is asymmetric, and the 3->0 omnivory edge
    // keeps the undirected view non-bipartite (a bipartite component would
    // pair +-lambda singular blocks and collapse the within/cross link
    // separation the qualitative diagnostics measure).
    return from_edges(6,
                      {{1, 0}, {2, 0}, {3, 0}, {3, 1}, {3, 2}, {4, 2}, {5, 3}, {5, 4}},
                      true);
}

TwinFoodWeb twin_food_web() {
    TwinFoodWeb preset;
    preset.graph = twin_graph(food_web_component());
    return preset;
}

AttributedGraph preset_graph(const std::string& name) {
    if (name == "triangle") {
        return from_edges(3, {{0, 1}, {1, 2}, {0, 2}}, false);
    }
    if (name == "path-4") {
        return from_edges(4, {{0, 1}, {1, 2}, {2, 3}}, false);
    }
    if (name == "star-5") {
        return from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, false);
    }
    if (name == "cycle-6") {
        return from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}, false);
    }
    if (name == "twin-asym4") {
        return twin_graph(asymmetric4());
    }
    if (name == "foodweb") {
        return food_web_component();
    }
    if (name == "twin-foodweb") {
        return twin_food_web().graph;
    }
    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; choices:";
    for (const auto& p : preset_names()) msg << ' ' << p;
    throw std::invalid_argument(msg.str());
}

std::vector<std::string> preset_names() {
    return {"triangle", "path-4", "star-5", "cycle-6", "twin-asym4", "foodweb",
            "twin-foodweb"};
}

std::vector<std::string> oracle_preset_names() {
    return {"triangle", "path-4", "star-5", "cycle-6", "twin-asym4"};
}

} // namespace mcstruct
