#pragma once

#include <array>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "archrecon/io.hpp"
#include "archrecon/matrix.hpp"
#include "archrecon/objectives.hpp"
#include "archrecon/store.hpp"

namespace httplib {
class Server;
}

namespace archrecon {

/// Inclusive per-objective bounds in raw objective units. The target is one
/// run's final front, or the reference front of `reference_runs`.
struct FilterQuery {
    std::array<std::optional<double>, kObjectiveCount> lower{};
    std::array<std::optional<double>, kObjectiveCount> upper{};
    std::optional<std::string> run;
    std::vector<std::string> reference_runs;

    /// Throws ContractViolation when a lower bound exceeds its upper bound.
    void validate() const;
};

/// Reads `{"bounds": {name-or-index: [lo|null, hi|null], ...}, "runs": [...]}`.
FilterQuery filter_query_from_json(const Json& j);

struct FilteredSolution {
    SolutionRef ref;
    ObjectiveVector objectives{};
};

std::vector<FilteredSolution> filter_solutions(const ResultStore& store, const FilterQuery& query);

struct ViolationDetail {
    ForbiddenEdge edge;
    std::string from_name;
    std::string to_name;
};

struct SolutionDetail {
    SolutionRef ref;
    ObjectiveVector objectives{};
    ArchitectureSolution solution;
    std::vector<std::string> layer_names;
    std::vector<PackageMetrics> packages;
    std::vector<ViolationDetail> violations;
    std::vector<Edge> cyclic_edges;
};

/// Assignments, per-package metrics, forbidden type edges and cyclic package
/// edges of a stored solution, under the model the run was evaluated with.
SolutionDetail solution_detail(const ResultStore& store, std::string_view ref);
Json to_json(const SolutionDetail& detail);

/// Spec of a re-run of `base_id` with extra pins and config overrides. Pins
/// are bound eagerly, so conflicts raise PinConflictError before anything is
/// queued. Empty pins with empty overrides raise ContractViolation.
RunSpec constrained_spec(const ResultStore& store, const std::string& base_id, const std::vector<Pin>& extra_pins,
                         const Json& overrides);

Json to_json(const RunRecord& record);

/// Owns the store and a background run queue; exposes the HTTP surface.
class Service {
public:
    explicit Service(std::filesystem::path store_root, int workers = 1);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    ResultStore& store() noexcept { return store_; }

    /// Queues the run unless it is already complete or queued.
    RunRecord submit(const RunSpec& spec);
    /// Blocks until the queue is empty and no run is executing.
    void wait_idle();

    void mount(httplib::Server& server);

private:
    void work();

    ResultStore store_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable idle_;
    std::deque<RunSpec> queue_;
    std::vector<std::string> queued_ids_;
    int busy_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

/// Port from ARCHRECON_PORT, else 8080.
int service_port();

/// Serves until the process is stopped. Returns non-zero if binding fails.
int serve(const std::filesystem::path& store_root, const std::string& host, int port, int workers = 1);

}  // namespace archrecon
