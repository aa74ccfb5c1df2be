#ifndef MCSTRUCT_PRESETS_HPP
#define MCSTRUCT_PRESETS_HPP

#include "mcstruct/graph.hpp"

#include <string>
#include <vector>

namespace mcstruct {

/// Twin food web: two identical 6-node directed chain-with-branches
/// components. The named handles point at the top predator of component one
/// (lynx analog), its mid-chain predator (coyote analog), and their copies
/// in component two (orca and seal analogs). The base component has a
/// trivial automorphism group, so the node orbits of the twin graph are
/// exactly the pairs {i, i + 6}.
struct TwinFoodWeb {
    AttributedGraph graph;
    int lynx = 5;
    int coyote = 3;
    int orca = 11;
    int seal = 9;
};

/// The single 6-node chain-with-branches component.
AttributedGraph food_web_component();

TwinFoodWeb twin_food_web();

/// Named oracle-scale presets (n <= 12). Known names:
///   triangle, path-4, star-5, cycle-6, twin-asym4, twin-foodweb, foodweb
/// Unknown names throw std::invalid_argument listing the choices.
AttributedGraph preset_graph(const std::string& name);

std::vector<std::string> preset_names();

/// The five n <= 10 presets used by the equivariance suite.
std::vector<std::string> oracle_preset_names();

} // namespace mcstruct

#endif
