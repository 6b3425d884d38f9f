#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "archrecon/harness.hpp"
#include "archrecon/indicators.hpp"
#include "archrecon/store.hpp"

namespace archrecon {

struct MatrixSystem {
    std::string name;
    std::filesystem::path graph;
    std::filesystem::path model;
    /// Set instead of the paths for a generated system.
    struct Synthetic {
        int units = 120;
        int packages = 12;
        int layers = 4;
        double noise = 0.05;
        std::uint64_t seed = 0;
    };
    std::optional<Synthetic> synthetic;
};

struct ExperimentMatrix {
    std::vector<std::string> algorithms;
    std::vector<MatrixSystem> systems;
    std::vector<std::string> scenarios;
    std::vector<std::uint64_t> seeds;
    /// Shared settings; algorithm, scenario and seed are overwritten per cell.
    RunConfig base;

    std::size_t run_count() const noexcept {
        return algorithms.size() * systems.size() * scenarios.size() * seeds.size();
    }
};

/// Matrix file:
///   {"algorithms": [...], "scenarios": [...], "seeds": 10 | [0, 1, ...],
///    "systems": [{"name": n, "graph": path, "model": path} |
///                {"name": n, "synthetic": {"units", "packages", "layers", "noise", "seed"}}],
///    "config": {...}}
/// Relative paths resolve against `base_dir`.
ExperimentMatrix parse_matrix(std::string_view document, const std::filesystem::path& base_dir);

/// One spec per cell and seed, systems loaded; order is systems, algorithms,
/// scenarios, seeds.
std::vector<RunSpec> expand_matrix(const ExperimentMatrix& matrix);

struct MatrixOptions {
    int workers = 1;
    /// Stop after starting this many runs; models an interrupted matrix.
    std::optional<std::size_t> max_runs;
};

struct MatrixReport {
    std::vector<std::string> run_ids;
    std::size_t executed = 0;
    std::size_t skipped = 0;
    /// (run id, message) for runs that threw.
    std::vector<std::pair<std::string, std::string>> failures;
};

/// Executes every spec not already complete. Per-run failures are recorded
/// and the matrix continues; a corrupt store aborts with StoreError.
MatrixReport run_matrix(const std::vector<RunSpec>& specs, ResultStore& store, const MatrixOptions& options = {});

enum class SliceBy { algorithm, system, scenario };

std::string_view to_string(SliceBy by) noexcept;
SliceBy parse_slice_by(std::string_view token);

struct StatRow {
    std::string slice;
    std::string metric;
    Summary summary;
};

struct StatsResult {
    std::vector<StatRow> rows;
    /// Slices left out because they pooled no values.
    std::vector<std::string> warnings;
    /// Across the reported slices; absent with fewer than two.
    std::optional<KruskalWallis> test;
};

/// Pools one objective over all final-front solutions of the completed runs
/// in each slice and reports min, max and median.
StatsResult descriptive_stats(const ResultStore& store, const std::vector<RunRecord>& runs, SliceBy by,
                              std::size_t objective);

/// CSV with header slice,metric,min,max,median,n.
std::string stats_csv(const std::vector<StatRow>& rows);

/// Reference front over the final fronts of `run_ids`, ordered by id.
struct StoreReference {
    std::vector<std::string> runs;
    ReferenceFront front;
    /// Index into the run's final front for each reference point.
    std::vector<std::size_t> member;
};

StoreReference reference_for(const ResultStore& store, std::vector<std::string> run_ids);

struct IndicatorRow {
    std::string run;
    long long evals = 0;
    IndicatorValues values;
};

/// Indicators for every `every`-th snapshot of each run (the last snapshot is
/// always included) against the runs' common reference front.
void indicator_report(const ResultStore& store, const std::vector<std::string>& run_ids, std::size_t every,
                      const std::function<void(const IndicatorRow&)>& emit);

}  // namespace archrecon
