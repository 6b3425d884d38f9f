#include "archrecon/store.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "archrecon/errors.hpp"
#include "archrecon/io.hpp"

namespace archrecon {
namespace fs = std::filesystem;
namespace {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Json parse_stored(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path.string());
    } catch (const NotFoundError&) {
        throw StoreError("missing " + path.string());
    }
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw StoreError("corrupt " + path.string() + ": " + e.what());
    }
}

StoredSnapshot snapshot_from_json(const Json& j, const std::string& where) {
    StoredSnapshot s;
    try {
        s.evals = j.at("evals").get<long long>();
        for (const auto& v : j.at("archive")) s.archive.push_back(objectives_from_json(v, where + ".archive"));
        for (const auto& v : j.at("pop")) s.population.push_back(objectives_from_json(v, where + ".pop"));
    } catch (const Json::exception& e) {
        throw StoreError("corrupt snapshot in " + where + ": " + e.what());
    } catch (const ParseError& e) {
        throw StoreError("corrupt snapshot in " + where + ": " + e.what());
    }
    return s;
}

std::string snapshot_line(const Snapshot& snap) {
    Json archive = Json::array();
    for (const auto& v : snap.archive) archive.push_back(objectives_to_json(v));
    Json pop = Json::array();
    for (const auto& v : snap.population) pop.push_back(objectives_to_json(v));
    Json j = {{"evals", snap.eval_count}, {"archive", std::move(archive)}, {"pop", std::move(pop)}};
    return j.dump() + "\n";
}

}  // namespace

std::string run_id(const RunSpec& spec) {
    const Json canonical = {{"graph", graph_to_json(spec.graph)},
                            {"model", model_to_json(spec.model, spec.pins)},
                            {"config", config_to_json(spec.config)}};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical.dump())));
    return buf;
}

std::string_view to_string(RunStatus status) noexcept {
    switch (status) {
        case RunStatus::queued: return "queued";
        case RunStatus::running: return "running";
        case RunStatus::done: return "done";
        case RunStatus::failed: return "failed";
    }
    return "unknown";
}

RunStatus parse_run_status(std::string_view token) {
    if (token == "queued") return RunStatus::queued;
    if (token == "running") return RunStatus::running;
    if (token == "done") return RunStatus::done;
    if (token == "failed") return RunStatus::failed;
    throw StoreError("unknown run status '" + std::string(token) + "'");
}

SolutionRef SolutionRef::parse(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
        throw NotFoundError("malformed solution reference '" + std::string(text) + "'");
    SolutionRef ref;
    ref.run = std::string(text.substr(0, colon));
    std::size_t index = 0;
    for (char c : text.substr(colon + 1)) {
        if (c < '0' || c > '9') throw NotFoundError("malformed solution reference '" + std::string(text) + "'");
        index = index * 10 + static_cast<std::size_t>(c - '0');
    }
    ref.index = index;
    return ref;
}

ResultStore::ResultStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_ / "runs"); }

fs::path ResultStore::run_dir(const std::string& id) const {
    if (id.empty() || id.find_first_of("/\\.") != std::string::npos) throw NotFoundError("invalid run id '" + id + "'");
    return root_ / "runs" / id;
}

bool ResultStore::exists(const std::string& id) const { return fs::is_directory(run_dir(id)); }

bool ResultStore::is_complete(const std::string& id) const {
    if (!exists(id) || !fs::exists(run_dir(id) / "front.json")) return false;
    return record(id).status == RunStatus::done;
}

void ResultStore::write_status(const RunRecord& r) const {
    const Json j = {{"id", r.id},
                    {"status", std::string(to_string(r.status))},
                    {"system", r.system},
                    {"latest_eval", r.latest_eval},
                    {"wall_time", r.wall_time},
                    {"error", r.error}};
    write_file_atomic((r.path / "status.json").string(), j.dump(2) + "\n");
}

RunRecord ResultStore::prepare(const RunSpec& spec) {
    RunRecord r;
    r.id = run_id(spec);
    r.path = run_dir(r.id);
    if (fs::is_directory(r.path) && fs::exists(r.path / "status.json")) return record(r.id);
    fs::create_directories(r.path);
    r.config = spec.config;
    r.system = spec.system;
    const Json config = {{"run_id", r.id}, {"system", spec.system}, {"config", config_to_json(spec.config)}};
    write_file_atomic((r.path / "config.json").string(), config.dump(2) + "\n");
    write_file_atomic((r.path / "graph.json").string(), graph_to_json(spec.graph).dump() + "\n");
    write_file_atomic((r.path / "model.json").string(), model_to_json(spec.model, spec.pins).dump(2) + "\n");
    write_status(r);
    return r;
}

RunRecord ResultStore::execute(const RunSpec& spec) {
    RunRecord r = prepare(spec);
    if (is_complete(r.id)) return record(r.id);
    r.status = RunStatus::running;
    r.error.clear();
    r.latest_eval = 0;
    write_status(r);
    try {
        spec.config.validate();
        const Problem problem = problem_for(spec);
        std::ofstream snaps(r.path / "snapshots.jsonl", std::ios::binary | std::ios::trunc);
        if (!snaps) throw StoreError("cannot write snapshots for run " + r.id);
        RunHooks hooks;
        hooks.retain_snapshots = false;
        hooks.on_snapshot = [&](const Snapshot& s) {
            snaps << snapshot_line(s);
            snaps.flush();
            r.latest_eval = s.eval_count;
            write_status(r);
        };
        const RunResult result = run(problem, spec.config, hooks);
        snaps.close();

        Json front = Json::array();
        for (const auto& m : result.final_front)
            front.push_back({{"objectives", objectives_to_json(m.objectives)},
                             {"unit_to_package", m.solution.unit_to_package},
                             {"package_to_layer", m.solution.package_to_layer}});
        r.wall_time = result.wall_time;
        write_file_atomic((r.path / "front.json").string(), front.dump() + "\n");
        r.status = RunStatus::done;
        write_status(r);
    } catch (const std::exception& e) {
        r.status = RunStatus::failed;
        r.error = e.what();
        write_status(r);
        throw;
    }
    return r;
}

std::vector<RunRecord> ResultStore::list() const {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(root_ / "runs"))
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    std::sort(ids.begin(), ids.end());
    std::vector<RunRecord> out;
    for (const auto& id : ids) out.push_back(record(id));
    return out;
}

RunRecord ResultStore::record(const std::string& id) const {
    const fs::path dir = run_dir(id);
    if (!fs::is_directory(dir)) throw NotFoundError("unknown run '" + id + "'");
    const Json status = parse_stored(dir / "status.json");
    const Json config = parse_stored(dir / "config.json");
    RunRecord r;
    r.id = id;
    r.path = dir;
    try {
        r.status = parse_run_status(status.at("status").get<std::string>());
        r.latest_eval = status.at("latest_eval").get<long long>();
        r.wall_time = status.at("wall_time").get<double>();
        r.error = status.at("error").get<std::string>();
        r.system = config.at("system").get<std::string>();
        r.config = config_from_json(config.at("config"));
    } catch (const Json::exception& e) {
        throw StoreError("corrupt record for run " + id + ": " + e.what());
    } catch (const ParseError& e) {
        throw StoreError("corrupt record for run " + id + ": " + e.what());
    }
    return r;
}

RunSpec ResultStore::load_spec(const std::string& id) const {
    const RunRecord r = record(id);
    RunSpec spec;
    try {
        spec.graph = parse_graph(read_file((r.path / "graph.json").string()));
        ModelDocument doc = parse_model(read_file((r.path / "model.json").string()));
        spec.model = std::move(doc.model);
        spec.pins = std::move(doc.pins);
    } catch (const NotFoundError& e) {
        throw StoreError(std::string("run ") + id + ": " + e.what());
    } catch (const ParseError& e) {
        throw StoreError(std::string("run ") + id + ": " + e.what());
    }
    spec.config = r.config;
    spec.system = r.system;
    return spec;
}

std::vector<FrontMember> ResultStore::load_front(const std::string& id) const {
    const fs::path dir = run_dir(id);
    if (!fs::is_directory(dir)) throw NotFoundError("unknown run '" + id + "'");
    if (!fs::exists(dir / "front.json")) throw NotFoundError("run '" + id + "' has no front yet");
    const Json j = parse_stored(dir / "front.json");
    std::vector<FrontMember> out;
    try {
        for (std::size_t i = 0; i < j.size(); ++i) {
            FrontMember m;
            m.objectives = objectives_from_json(j[i].at("objectives"), "front[" + std::to_string(i) + "]");
            m.solution.unit_to_package = j[i].at("unit_to_package").get<std::vector<int>>();
            m.solution.package_to_layer = j[i].at("package_to_layer").get<std::vector<int>>();
            out.push_back(std::move(m));
        }
    } catch (const Json::exception& e) {
        throw StoreError("corrupt front for run " + id + ": " + e.what());
    } catch (const ParseError& e) {
        throw StoreError("corrupt front for run " + id + ": " + e.what());
    }
    return out;
}

void ResultStore::for_each_snapshot(const std::string& id,
                                    const std::function<void(const StoredSnapshot&)>& visit) const {
    const fs::path path = run_dir(id) / "snapshots.jsonl";
    if (!fs::is_directory(run_dir(id))) throw NotFoundError("unknown run '" + id + "'");
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (in.eof()) break;  // no trailing newline: the writer is mid-line
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception&) {
            throw StoreError("corrupt snapshots for run " + id + " at line " + std::to_string(number));
        }
        visit(snapshot_from_json(j, path.string() + ":" + std::to_string(number)));
    }
}

std::vector<StoredSnapshot> ResultStore::load_snapshots(const std::string& id, long long after) const {
    std::vector<StoredSnapshot> out;
    for_each_snapshot(id, [&](const StoredSnapshot& s) {
        if (s.evals > after) out.push_back(s);
    });
    return out;
}

RunSpec spec_from_json(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ParseError("$", "run request must be an object");
    auto document = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end()) throw ParseError(key, "missing field");
        if (it->is_object()) return it->dump();
        if (!it->is_string()) throw ParseError(key, "expected a document object or a file path");
        const fs::path path = base_dir / it->get<std::string>();
        try {
            return read_file(path.string());
        } catch (const NotFoundError& e) {
            throw ParseError(key, e.what());
        }
    };
    RunSpec spec;
    if (auto syn = j.find("synthetic"); syn != j.end()) {
        if (!syn->is_object()) throw ParseError("synthetic", "expected an object");
        try {
            SyntheticSystem s = make_synthetic_system(syn->value("units", 120), syn->value("packages", 12),
                                                      syn->value("layers", 4), syn->value("noise", 0.05),
                                                      syn->value("seed", std::uint64_t{0}));
            spec.graph = std::move(s.graph);
            spec.model = std::move(s.model);
        } catch (const Json::exception& e) {
            throw ParseError("synthetic", e.what());
        }
        spec.system = "synthetic";
    } else {
        spec.graph = parse_graph(document("graph"));
        ModelDocument doc = parse_model(document("model"));
        spec.model = std::move(doc.model);
        spec.pins = std::move(doc.pins);
    }
    if (auto c = j.find("config"); c != j.end()) spec.config = config_from_json(*c);
    if (auto s = j.find("system"); s != j.end()) {
        if (!s->is_string()) throw ParseError("system", "expected a string");
        spec.system = s->get<std::string>();
    }
    try {
        spec.config.validate();
        parse_scenario(spec.config.scenario);
    } catch (const ContractViolation& e) {
        throw ParseError("config", e.what());
    }
    return spec;
}

Problem problem_for(const RunSpec& spec) {
    return make_problem(spec.graph, spec.model, spec.pins, parse_scenario(spec.config.scenario), spec.config.seed);
}

}  // namespace archrecon
