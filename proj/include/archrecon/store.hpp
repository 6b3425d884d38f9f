#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "archrecon/graph.hpp"
#include "archrecon/harness.hpp"
#include "archrecon/io.hpp"
#include "archrecon/search.hpp"

namespace archrecon {

/// Everything that determines a run. `system` is a display label only and
/// does not enter the run id.
struct RunSpec {
    DependencyGraph graph;
    ConceptualModel model;
    std::vector<Pin> pins;
    RunConfig config;
    std::string system = "system";
};

/// 16 hex digits of FNV-1a over the canonical JSON of graph, model, pins and
/// config. Stable under re-serialization.
std::string run_id(const RunSpec& spec);

enum class RunStatus { queued, running, done, failed };

std::string_view to_string(RunStatus status) noexcept;
RunStatus parse_run_status(std::string_view token);

struct RunRecord {
    std::string id;
    RunStatus status = RunStatus::queued;
    RunConfig config;
    std::string system;
    std::filesystem::path path;
    long long latest_eval = 0;
    std::string error;
    double wall_time = 0.0;
};

struct StoredSnapshot {
    long long evals = 0;
    std::vector<ObjectiveVector> archive;
    std::vector<ObjectiveVector> population;
};

/// `<run_id>:<front index>`.
struct SolutionRef {
    std::string run;
    std::size_t index = 0;

    std::string str() const { return run + ":" + std::to_string(index); }
    /// Throws NotFoundError on a malformed reference.
    static SolutionRef parse(std::string_view text);
};

/// One directory per run under `<root>/runs/<id>/`:
///   config.json     config echo plus system label
///   graph.json, model.json   the inputs, as parsed
///   status.json     RunRecord fields
///   snapshots.jsonl one snapshot per line
///   front.json      final front; written last
/// A run counts as complete when status is done and front.json exists.
class ResultStore {
public:
    explicit ResultStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path run_dir(const std::string& id) const;

    bool exists(const std::string& id) const;
    bool is_complete(const std::string& id) const;

    /// Writes inputs and a queued status unless the run directory exists.
    RunRecord prepare(const RunSpec& spec);

    /// Executes the run unless already complete, streaming snapshots to disk.
    /// Failures are recorded in status.json and rethrown.
    RunRecord execute(const RunSpec& spec);

    std::vector<RunRecord> list() const;
    RunRecord record(const std::string& id) const;
    RunSpec load_spec(const std::string& id) const;
    std::vector<FrontMember> load_front(const std::string& id) const;
    /// Snapshots with evals > `after`. A trailing partial line is ignored.
    std::vector<StoredSnapshot> load_snapshots(const std::string& id, long long after = -1) const;
    /// Calls `visit` for each snapshot in order without holding them all.
    void for_each_snapshot(const std::string& id, const std::function<void(const StoredSnapshot&)>& visit) const;

private:
    void write_status(const RunRecord& record) const;

    std::filesystem::path root_;
};

/// Reads a run request: `{"graph": doc|path, "model": doc|path, "config": {...},
/// "system": name}` or `{"synthetic": {"units", "packages", "layers", "noise",
/// "seed"}, "config": {...}}`. Relative paths resolve against `base_dir`.
RunSpec spec_from_json(const Json& j, const std::filesystem::path& base_dir);

/// Problem for a stored or submitted spec: scenario, pins and seed applied.
Problem problem_for(const RunSpec& spec);

}  // namespace archrecon
