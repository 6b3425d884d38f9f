#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "archrecon/graph.hpp"
#include "archrecon/search.hpp"

namespace archrecon {

enum class ScenarioId { transient4, strict4, strict4_mounted };

std::string_view to_string(ScenarioId id) noexcept;
ScenarioId parse_scenario(std::string_view token);

struct Scenario {
    ScenarioId id = ScenarioId::transient4;
    int layer_count = 4;
    LayerStyle style = LayerStyle::transient;
    /// Package->layer genes frozen to a per-seed random assignment.
    bool mounted = false;
    /// Start from the graph's origin package mapping instead of random genotypes.
    bool seed_from_origin = false;
};

Scenario scenario(ScenarioId id);

/// The scenario's layered model derived from a base model: style and layer
/// count come from the scenario, layer names and package slots from the base
/// when the layer counts agree.
ConceptualModel scenario_model(const ConceptualModel& base, const Scenario& s);

/// Per-seed random package->layer mounting. Packages already pinned to a
/// layer keep their pin and are left out of the mask.
FreezeMask mounted_layers(std::size_t packages, int layers, std::uint64_t seed, const PinTable& pins);

/// Genotype reproducing the origin package mapping; package genes encode
/// `package_layers` when given, else the centre of layer 0.
Genotype origin_genotype(const DependencyGraph& graph, std::size_t packages, int layers,
                         const std::vector<std::optional<int>>& package_layers);

/// Binds graph, model, pins and scenario into a search problem for one seed.
Problem make_problem(const DependencyGraph& graph, const ConceptualModel& base, const std::vector<Pin>& pins,
                     ScenarioId id, std::uint64_t seed);

struct SyntheticSystem {
    DependencyGraph graph;
    ConceptualModel model;
    ArchitectureSolution planted;
    /// The random extra edges, as added (before any were found to duplicate).
    std::vector<Edge> noise_edges;
};

/// Share of units whose origin package is redrawn at random.
constexpr double kOriginDrift = 0.3;

/// Graph with a planted layered decomposition. Packages are spread evenly over
/// layers top-down, units round-robin over packages. Each unit gets two edges
/// to later members of its own package and one edge into a package of the
/// next layer down; then round(noise * edge count) uniformly random new edges
/// are added. Type names carry the planted package; origin packages are the
/// planted ones except for a kOriginDrift share of units. The model is strict.
SyntheticSystem make_synthetic_system(int units, int packages, int layers, double noise, std::uint64_t seed);

struct Summary {
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
    std::size_t n = 0;
};

/// Min, max and median of a non-empty sample.
Summary summarize(std::vector<double> values);
double median(std::vector<double> values);

struct KruskalWallis {
    double h = 0.0;
    double p = 1.0;
};

/// Rank-based H with tie correction; p from the chi-square survival function
/// with groups - 1 degrees of freedom. All-identical data gives H = 0, p = 1.
KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& groups);

}  // namespace archrecon
