#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "archrecon/graph.hpp"

namespace archrecon {

inline constexpr std::size_t kObjectiveCount = 8;

/// All eight objectives, canonical order, lower is better on every axis:
/// [neg_cohesion, nccd_deviation, efferent, afferent, distance, violations,
///  cyclic_edges, size_range].
using ObjectiveVector = std::array<double, kObjectiveCount>;

enum class Objective : std::size_t {
    neg_cohesion = 0,
    nccd_deviation,
    efferent,
    afferent,
    distance,
    violations,
    cyclic_edges,
    size_range,
};

inline constexpr std::array<std::string_view, kObjectiveCount> kObjectiveNames = {
    "neg_cohesion", "nccd_deviation", "efferent", "afferent",
    "distance",     "violations",     "cyclic_edges", "size_range"};

/// Index of an objective by canonical name or numeric string; nullopt if unknown.
std::optional<std::size_t> objective_index(std::string_view name);

/// How per-package ("subsystem") measures are folded into one value.
enum class Aggregation { mean, sum };

std::string_view to_string(Aggregation agg) noexcept;
Aggregation parse_aggregation(std::string_view token);

/// Relational cohesion H_p = (R_p + 1) / N_p folded over non-empty packages.
double relational_cohesion(const DependencyGraph& graph, const ArchitectureSolution& sol,
                           Aggregation agg = Aggregation::mean);

/// Cumulative component dependency over the package graph, normalized by the
/// CCD of a balanced binary tree with the same node count.
double nccd(const PackageGraph& pg);
double balanced_ccd(std::size_t n);

double efferent_coupling(const PackageGraph& pg, Aggregation agg = Aggregation::mean);
double afferent_coupling(const PackageGraph& pg, Aggregation agg = Aggregation::mean);

/// Distance from the main sequence |A + I - 1|, over packages with Ce + Ca > 0.
double distance(const DependencyGraph& graph, const PackageGraph& pg, const ArchitectureSolution& sol,
                Aggregation agg = Aggregation::mean);

long long forbidden_dependencies(const DependencyGraph& graph, const ArchitectureSolution& sol,
                                 const ConceptualModel& model);

/// Number of package edges inside a strongly connected component of size >= 2.
long long package_cycles(const PackageGraph& pg);

/// max - min unit count over all package slots, empty slots included.
long long size_range(const ArchitectureSolution& sol, std::size_t units);

ObjectiveVector evaluate(const DependencyGraph& graph, const ArchitectureSolution& sol,
                         const ConceptualModel& model, Aggregation agg = Aggregation::mean);

/// Strongly connected component id per local node of the package graph.
std::vector<int> strongly_connected_components(const PackageGraph& pg);

struct PackageMetrics {
    int package = 0;
    int layer = 0;
    int size = 0;
    int abstract_units = 0;
    int internal_edges = 0;
    double cohesion = 0.0;
    int efferent = 0;
    int afferent = 0;
    std::optional<double> distance;  // unset when Ce + Ca == 0
};

struct ForbiddenEdge {
    int from = 0;
    int to = 0;
    int from_layer = 0;
    int to_layer = 0;
};

std::vector<PackageMetrics> package_metrics(const DependencyGraph& graph, const ArchitectureSolution& sol);
std::vector<ForbiddenEdge> forbidden_edges(const DependencyGraph& graph, const ArchitectureSolution& sol,
                                           const ConceptualModel& model);
/// Package edges (package ids) that lie on a cycle.
std::vector<Edge> cyclic_package_edges(const PackageGraph& pg);

}  // namespace archrecon
