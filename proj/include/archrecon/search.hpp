#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "archrecon/encoding.hpp"
#include "archrecon/graph.hpp"
#include "archrecon/objectives.hpp"

namespace archrecon {

enum class Algorithm { nsga2, omopso, gde3, random };

std::string_view to_string(Algorithm algorithm) noexcept;
/// Accepts "nsga2", "omopso_style"/"omopso", "gde3_style"/"gde3", "random".
Algorithm parse_algorithm(std::string_view token);

struct RunConfig {
    Algorithm algorithm = Algorithm::nsga2;
    int population = 50;
    long long max_evaluations = 50'000;
    long long snapshot_interval = 50;
    double mutation_rate = 0.5;
    double mutation_di = 10.0;
    double crossover_rate = 1.0;
    double crossover_di = 10.0;
    std::uint64_t seed = 0;
    std::string scenario = "transient4";
    Aggregation aggregation = Aggregation::mean;
    /// Leader-archive epsilon per objective axis, relative to the initial swarm's range.
    double epsilon = 0.0075;
    /// Differential variation parameters.
    double de_crossover = 0.5;
    double de_scale = 0.5;

    /// Throws ContractViolation on an invalid combination.
    void validate() const;
};

/// A graph, model and fixed assignments bound together, ready to evaluate.
class Problem {
public:
    Problem(DependencyGraph graph, ConceptualModel model, const PinTable& pins, FreezeMask frozen = {});
    Problem(DependencyGraph graph, ConceptualModel model, const std::vector<Pin>& pins = {},
            FreezeMask frozen = {});

    const DependencyGraph& graph() const noexcept { return graph_; }
    const ConceptualModel& model() const noexcept { return model_; }
    const PinTable& pins() const noexcept { return pins_; }
    const FreezeMask& frozen() const noexcept { return frozen_; }
    /// Pins with the freeze mask folded in; what decode actually honors.
    const PinTable& fixed() const noexcept { return fixed_; }

    std::size_t units() const noexcept { return graph_.unit_count(); }
    std::size_t packages() const noexcept { return fixed_.package_layer.size(); }
    int layers() const noexcept { return model_.layer_count(); }
    std::size_t genome_length() const noexcept { return units() + packages(); }

    ArchitectureSolution decode(std::span<const double> genes) const { return archrecon::decode(genes, fixed_, layers()); }
    ObjectiveVector evaluate(const ArchitectureSolution& sol, Aggregation agg) const {
        return archrecon::evaluate(graph_, sol, model_, agg);
    }

    /// True when every fixed entry holds in the solution.
    bool honors_fixed(const ArchitectureSolution& sol) const;

    /// When set, evolutionary algorithms start from this genotype and mutated
    /// copies of it instead of uniform random genotypes.
    const std::optional<Genotype>& initial_genotype() const noexcept { return initial_; }
    void set_initial_genotype(Genotype g);

private:
    DependencyGraph graph_;
    ConceptualModel model_;
    PinTable pins_;
    FreezeMask frozen_;
    PinTable fixed_;
    std::optional<Genotype> initial_;
};

struct Snapshot {
    long long eval_count = 0;
    std::vector<ObjectiveVector> population;
    std::vector<ObjectiveVector> archive;

    bool operator==(const Snapshot&) const = default;
};

struct FrontMember {
    ObjectiveVector objectives{};
    ArchitectureSolution solution;

    bool operator==(const FrontMember&) const = default;
};

struct RunResult {
    RunConfig config;
    std::vector<Snapshot> snapshots;
    std::vector<FrontMember> final_front;
    long long evaluations = 0;
    double wall_time = 0.0;
};

struct RunHooks {
    /// Called for each snapshot as it is taken.
    std::function<void(const Snapshot&)> on_snapshot;
    /// Called for every evaluation, in order.
    std::function<void(const ArchitectureSolution&, const ObjectiveVector&)> on_evaluation;
    /// Keep snapshots in RunResult. Long runs that stream snapshots elsewhere
    /// can turn this off to bound memory.
    bool retain_snapshots = true;
};

/// Runs one seed of the configured optimizer. Every optimizer shares the same
/// unbounded non-dominated archive over all evaluated points; that archive is
/// what snapshots and the final front report.
RunResult run(const Problem& problem, const RunConfig& config, const RunHooks& hooks = {});

/// Non-dominated sorting: front index per point (0 = first front).
std::vector<int> nondominated_ranks(const std::vector<ObjectiveVector>& points);
/// Crowding distance of each member of `front` (indices into points).
std::vector<double> crowding_distances(const std::vector<ObjectiveVector>& points, const std::vector<int>& front);

}  // namespace archrecon
