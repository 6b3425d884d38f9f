// archrecon command-line entry point.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "archrecon/errors.hpp"
#include "archrecon/harness.hpp"
#include "archrecon/io.hpp"
#include "archrecon/matrix.hpp"
#include "archrecon/service.hpp"
#include "archrecon/store.hpp"

namespace fs = std::filesystem;
using namespace archrecon;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;

/// Thrown for bad flag values that CLI11 cannot check itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

Json load_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(path, e.what());
    }
}

std::vector<std::string> select_runs(const ResultStore& store, const std::string& runs) {
    std::vector<std::string> ids = split_list(runs);
    if (!ids.empty()) return ids;
    for (const auto& r : store.list())
        if (r.status == RunStatus::done) ids.push_back(r.id);
    if (ids.empty()) throw NotFoundError("store has no completed runs");
    return ids;
}

int cmd_ingest(const std::string& graph_path, const std::string& model_path) {
    const DependencyGraph graph = parse_graph(read_file(graph_path));
    const ModelDocument doc = parse_model(read_file(model_path));
    const int slots = resolve_package_slots(graph, doc.model);
    const PinTable pins = bind_pins(doc.pins, graph, doc.model, slots);
    std::cout << "types " << graph.unit_count() << "\n"
              << "dependencies " << graph.edges().size() << "\n"
              << "layers " << doc.model.layer_count() << " (" << to_string(doc.model.style()) << ")\n"
              << "package_slots " << slots << "\n"
              << "pins " << doc.pins.size() << " (" << pins.pinned_unit_count() << " units, "
              << pins.pinned_package_count() << " packages)\n";
    return 0;
}

int cmd_synth(int units, int packages, int layers, double noise, std::uint64_t seed, const std::string& out_dir) {
    const SyntheticSystem sys = make_synthetic_system(units, packages, layers, noise, seed);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_file_atomic((dir / "graph.json").string(), graph_to_json(sys.graph).dump(2) + "\n");
    write_file_atomic((dir / "model.json").string(), model_to_json(sys.model, {}).dump(2) + "\n");
    const Json planted = {{"unit_to_package", sys.planted.unit_to_package},
                          {"package_to_layer", sys.planted.package_to_layer}};
    write_file_atomic((dir / "planted.json").string(), planted.dump(2) + "\n");
    std::cout << "wrote " << dir.string() << " (" << sys.graph.unit_count() << " types, " << sys.graph.edges().size()
              << " dependencies, " << sys.noise_edges.size() << " noise)\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& store_root) {
    const RunSpec spec = spec_from_json(load_json(config_path), fs::path(config_path).parent_path());
    ResultStore store(store_root);
    const std::string id = run_id(spec);
    if (store.is_complete(id)) {
        std::cout << "run " << id << " already complete\n";
        return 0;
    }
    const RunRecord r = store.execute(spec);
    std::cout << "run " << r.id << " done: " << store.load_front(r.id).size() << " front solutions, "
              << r.latest_eval << " evaluations, " << r.wall_time << " s\n";
    return 0;
}

int cmd_matrix(const std::string& matrix_path, const std::string& store_root, int workers,
               std::optional<std::size_t> max_runs) {
    const ExperimentMatrix matrix = parse_matrix(read_file(matrix_path), fs::path(matrix_path).parent_path());
    ResultStore store(store_root);
    const MatrixReport report = run_matrix(expand_matrix(matrix), store, {workers, max_runs});
    std::cout << "runs " << report.run_ids.size() << ", executed " << report.executed << ", skipped "
              << report.skipped << ", failed " << report.failures.size() << "\n";
    for (const auto& [id, message] : report.failures) std::cerr << "run " << id << " failed: " << message << "\n";
    return report.failures.empty() ? 0 : kData;
}

int cmd_indicators(const std::string& store_root, const std::string& runs, std::size_t every, const std::string& out) {
    const ResultStore store(store_root);
    std::ofstream file;
    if (!out.empty()) {
        file.open(out, std::ios::trunc);
        if (!file) throw StoreError("cannot write " + out);
    }
    std::ostream& os = out.empty() ? std::cout : file;
    indicator_report(store, select_runs(store, runs), every, [&](const IndicatorRow& row) {
        const Json line = {{"run", row.run},
                           {"evals", row.evals},
                           {"hv", row.values.hv},
                           {"gd", row.values.gd},
                           {"igd", row.values.igd},
                           {"eps", row.values.eps},
                           {"spacing", row.values.spacing},
                           {"contribution", row.values.contribution}};
        os << line.dump() << "\n";
    });
    return 0;
}

int cmd_stats(const std::string& store_root, const std::string& by, const std::string& objective,
              const std::string& runs) {
    const auto index = objective_index(objective);
    if (!index) throw UsageError("unknown objective '" + objective + "'");
    SliceBy slice;
    try {
        slice = parse_slice_by(by);
    } catch (const ContractViolation& e) {
        throw UsageError(e.what());
    }
    const ResultStore store(store_root);
    std::vector<RunRecord> records;
    for (const auto& id : select_runs(store, runs)) records.push_back(store.record(id));
    const StatsResult stats = descriptive_stats(store, records, slice, *index);
    for (const auto& w : stats.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << stats_csv(stats.rows);
    if (stats.test)
        std::cerr << "kruskal-wallis over " << stats.rows.size() << " slices: H=" << stats.test->h
                  << " p=" << stats.test->p << "\n";
    return 0;
}

int cmd_export(const std::string& store_root, const std::string& run, const std::string& format,
               const std::string& out) {
    const ResultStore store(store_root);
    const auto front = store.load_front(run);
    std::ostringstream os;
    if (format == "csv") {
        os << "index";
        for (auto name : kObjectiveNames) os << "," << name;
        os << ",unit_to_package,package_to_layer\n";
        auto joined = [](const std::vector<int>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
            return s;
        };
        for (std::size_t i = 0; i < front.size(); ++i) {
            os << i;
            for (double v : front[i].objectives) os << "," << Json(v).dump();
            os << "," << joined(front[i].solution.unit_to_package) << "," << joined(front[i].solution.package_to_layer)
               << "\n";
        }
    } else {
        Json arr = Json::array();
        for (std::size_t i = 0; i < front.size(); ++i)
            arr.push_back({{"ref", SolutionRef{run, i}.str()},
                           {"objectives", objectives_to_json(front[i].objectives)},
                           {"unit_to_package", front[i].solution.unit_to_package},
                           {"package_to_layer", front[i].solution.package_to_layer}});
        os << arr.dump(2) << "\n";
    }
    if (out.empty()) std::cout << os.str();
    else write_file_atomic(out, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective software architecture reconstruction"};
    app.require_subcommand(1);

    std::string graph_path, model_path, config_path, matrix_path, store_root = "results", runs, out, by = "algorithm",
                                                                   objective = "violations", run, format = "json",
                                                                   host = "127.0.0.1", out_dir = ".";
    int workers = 1, port = 0, units = 120, packages = 12, layers = 4;
    double noise = 0.05;
    std::uint64_t seed = 0;
    std::size_t every = 1;
    std::optional<std::size_t> max_runs;

    auto* ingest = app.add_subcommand("ingest", "Validate a graph/model pair and print its size");
    ingest->add_option("--graph", graph_path, "Graph JSON file")->required();
    ingest->add_option("--model", model_path, "Model JSON file")->required();

    auto* synth = app.add_subcommand("synth", "Write a synthetic system with a planted layering");
    synth->add_option("--units", units, "Compilation units")->capture_default_str();
    synth->add_option("--packages", packages, "Package slots")->capture_default_str();
    synth->add_option("--layers", layers, "Layers")->capture_default_str();
    synth->add_option("--noise", noise, "Share of random extra edges")->capture_default_str();
    synth->add_option("--seed", seed, "Generator seed")->capture_default_str();
    synth->add_option("--out-dir", out_dir, "Directory for graph.json, model.json, planted.json")->capture_default_str();

    auto* run_cmd = app.add_subcommand("run", "Execute one run from a config file");
    run_cmd->add_option("--config", config_path, "Run request JSON")->required();
    run_cmd->add_option("--store", store_root, "Results root")->capture_default_str();

    auto* matrix = app.add_subcommand("matrix", "Execute an experiment matrix, skipping completed runs");
    matrix->add_option("--matrix", matrix_path, "Matrix JSON")->required();
    matrix->add_option("--store", store_root, "Results root")->capture_default_str();
    matrix->add_option("--workers", workers, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
    matrix->add_option("--max-runs", max_runs, "Stop after starting this many runs");

    auto* indicators = app.add_subcommand("indicators", "Indicator report (JSON lines) for stored runs");
    indicators->add_option("--store", store_root, "Results root")->capture_default_str();
    indicators->add_option("--runs", runs, "Comma-separated run ids (default: all completed)");
    indicators->add_option("--every", every, "Use every n-th snapshot")->capture_default_str()->check(CLI::PositiveNumber);
    indicators->add_option("--out", out, "Output file (default: stdout)");

    auto* stats = app.add_subcommand("stats", "Descriptive statistics and Kruskal-Wallis by slice");
    stats->add_option("--store", store_root, "Results root")->capture_default_str();
    stats->add_option("--by", by, "algorithm|system|scenario")->capture_default_str();
    stats->add_option("--objective", objective, "Objective name or index")->capture_default_str();
    stats->add_option("--runs", runs, "Comma-separated run ids (default: all completed)");

    auto* export_cmd = app.add_subcommand("export", "Write a run's final front as CSV or JSON");
    export_cmd->add_option("--store", store_root, "Results root")->capture_default_str();
    export_cmd->add_option("--run", run, "Run id")->required();
    export_cmd->add_option("--format", format, "csv|json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    export_cmd->add_option("--out", out, "Output file (default: stdout)");

    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
    serve_cmd->add_option("--store", store_root, "Results root")->capture_default_str();
    serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
    serve_cmd->add_option("--port", port, "Port (default: ARCHRECON_PORT or 8080)");
    serve_cmd->add_option("--workers", workers, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*ingest) return cmd_ingest(graph_path, model_path);
        if (*synth) return cmd_synth(units, packages, layers, noise, seed, out_dir);
        if (*run_cmd) return cmd_run(config_path, store_root);
        if (*matrix) return cmd_matrix(matrix_path, store_root, workers, max_runs);
        if (*indicators) return cmd_indicators(store_root, runs, every, out);
        if (*stats) return cmd_stats(store_root, by, objective, runs);
        if (*export_cmd) return cmd_export(store_root, run, format, out);
        if (*serve_cmd) return serve(store_root, host, port > 0 ? port : service_port(), workers) == 0 ? 0 : kData;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    std::cerr << app.help();
    return kUsage;
}
