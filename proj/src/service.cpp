#include "archrecon/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "archrecon/errors.hpp"
#include "archrecon/harness.hpp"

namespace archrecon {
namespace {

bool within(const FilterQuery& q, const ObjectiveVector& v) {
    for (std::size_t k = 0; k < kObjectiveCount; ++k) {
        if (q.lower[k] && v[k] < *q.lower[k]) return false;
        if (q.upper[k] && v[k] > *q.upper[k]) return false;
    }
    return true;
}

Json objectives_object(const ObjectiveVector& v) {
    Json j = Json::object();
    for (std::size_t k = 0; k < kObjectiveCount; ++k) j[std::string(kObjectiveNames[k])] = v[k];
    return j;
}

Json solution_entry(const SolutionRef& ref, const ObjectiveVector& v) {
    return {{"ref", ref.str()}, {"run", ref.run}, {"index", ref.index}, {"objectives", objectives_to_json(v)}};
}

std::vector<std::string> split_runs(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        throw ParseError("body", e.what());
    }
}

void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

/// Runs a handler and maps library errors onto HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& handler) {
    try {
        handler();
    } catch (const NotFoundError& e) {
        send(res, 404, {{"error", e.what()}});
    } catch (const PinConflictError& e) {
        send(res, 409, {{"error", e.what()}, {"pins", {e.first(), e.second()}}});
    } catch (const ParseError& e) {
        send(res, 400, {{"error", e.what()}});
    } catch (const BindingError& e) {
        send(res, 400, {{"error", e.what()}});
    } catch (const ContractViolation& e) {
        send(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
        send(res, 500, {{"error", e.what()}});
    }
}

}  // namespace

void FilterQuery::validate() const {
    for (std::size_t k = 0; k < kObjectiveCount; ++k)
        if (lower[k] && upper[k] && *lower[k] > *upper[k])
            throw ContractViolation("filter: lower bound exceeds upper bound for " + std::string(kObjectiveNames[k]));
}

FilterQuery filter_query_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("filter", "expected an object");
    FilterQuery q;
    if (auto b = j.find("bounds"); b != j.end() && !b->is_null()) {
        if (!b->is_object()) throw ParseError("bounds", "expected an object");
        for (const auto& [key, v] : b->items()) {
            const auto k = objective_index(key);
            if (!k) throw ParseError("bounds." + key, "unknown objective");
            if (!v.is_array() || v.size() != 2) throw ParseError("bounds." + key, "expected [lower, upper]");
            for (std::size_t side = 0; side < 2; ++side) {
                if (v[side].is_null()) continue;
                if (!v[side].is_number()) throw ParseError("bounds." + key, "bounds must be numbers or null");
                (side == 0 ? q.lower : q.upper)[*k] = v[side].get<double>();
            }
        }
    }
    if (auto r = j.find("runs"); r != j.end()) {
        if (!r->is_array()) throw ParseError("runs", "expected an array of run ids");
        for (const auto& id : *r) q.reference_runs.push_back(id.get<std::string>());
    }
    q.validate();
    return q;
}

std::vector<FilteredSolution> filter_solutions(const ResultStore& store, const FilterQuery& query) {
    query.validate();
    std::vector<FilteredSolution> out;
    if (query.run) {
        const auto front = store.load_front(*query.run);
        for (std::size_t i = 0; i < front.size(); ++i)
            if (within(query, front[i].objectives)) out.push_back({{*query.run, i}, front[i].objectives});
        return out;
    }
    const StoreReference ref = reference_for(store, query.reference_runs);
    for (std::size_t i = 0; i < ref.front.points.size(); ++i) {
        ObjectiveVector v{};
        std::copy(ref.front.points[i].begin(), ref.front.points[i].end(), v.begin());
        if (within(query, v)) out.push_back({{ref.runs[ref.front.provenance[i]], ref.member[i]}, v});
    }
    return out;
}

SolutionDetail solution_detail(const ResultStore& store, std::string_view text) {
    const SolutionRef ref = SolutionRef::parse(text);
    const RunSpec spec = store.load_spec(ref.run);
    const auto front = store.load_front(ref.run);
    if (ref.index >= front.size()) throw NotFoundError("no solution " + ref.str());
    const ConceptualModel model = scenario_model(spec.model, scenario(parse_scenario(spec.config.scenario)));

    SolutionDetail d;
    d.ref = ref;
    d.objectives = front[ref.index].objectives;
    d.solution = front[ref.index].solution;
    d.layer_names = model.layer_names();
    d.packages = package_metrics(spec.graph, d.solution);
    for (const auto& e : forbidden_edges(spec.graph, d.solution, model))
        d.violations.push_back({e, spec.graph.node(e.from).fq_name, spec.graph.node(e.to).fq_name});
    d.cyclic_edges = cyclic_package_edges(package_graph(spec.graph, d.solution));
    return d;
}

Json to_json(const SolutionDetail& d) {
    Json packages = Json::array();
    for (const auto& p : d.packages) {
        Json entry = {{"package", p.package},       {"layer", p.layer},
                      {"size", p.size},             {"abstract_units", p.abstract_units},
                      {"internal_edges", p.internal_edges}, {"cohesion", p.cohesion},
                      {"efferent", p.efferent},     {"afferent", p.afferent}};
        entry["distance"] = p.distance ? Json(*p.distance) : Json(nullptr);
        packages.push_back(std::move(entry));
    }
    Json violations = Json::array();
    for (const auto& v : d.violations)
        violations.push_back({{"from", v.edge.from},
                              {"to", v.edge.to},
                              {"from_name", v.from_name},
                              {"to_name", v.to_name},
                              {"from_layer", v.edge.from_layer},
                              {"to_layer", v.edge.to_layer}});
    Json cycles = Json::array();
    for (const auto& e : d.cyclic_edges) cycles.push_back({{"from", e.from}, {"to", e.to}});
    return {{"ref", d.ref.str()},
            {"objectives", objectives_object(d.objectives)},
            {"unit_to_package", d.solution.unit_to_package},
            {"package_to_layer", d.solution.package_to_layer},
            {"layers", d.layer_names},
            {"packages", std::move(packages)},
            {"violations", std::move(violations)},
            {"cyclic_edges", std::move(cycles)}};
}

RunSpec constrained_spec(const ResultStore& store, const std::string& base_id, const std::vector<Pin>& extra_pins,
                         const Json& overrides) {
    if (extra_pins.empty() && (overrides.is_null() || overrides.empty()))
        throw ContractViolation("nothing to constrain");
    RunSpec spec = store.load_spec(base_id);
    spec.pins.insert(spec.pins.end(), extra_pins.begin(), extra_pins.end());
    if (!overrides.is_null()) spec.config = config_from_json(overrides, spec.config);
    spec.config.validate();
    problem_for(spec);
    return spec;
}

Json to_json(const RunRecord& r) {
    return {{"id", r.id},
            {"status", std::string(to_string(r.status))},
            {"system", r.system},
            {"config", config_to_json(r.config)},
            {"latest_eval", r.latest_eval},
            {"wall_time", r.wall_time},
            {"error", r.error}};
}

Service::Service(std::filesystem::path store_root, int workers) : store_(std::move(store_root)) {
    for (int i = 0; i < std::max(1, workers); ++i) workers_.emplace_back([this] { work(); });
}

Service::~Service() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    wake_.notify_all();
    for (auto& t : workers_) t.join();
}

RunRecord Service::submit(const RunSpec& spec) {
    std::lock_guard lock(mutex_);
    const std::string id = run_id(spec);
    if (store_.is_complete(id)) return store_.record(id);
    if (std::find(queued_ids_.begin(), queued_ids_.end(), id) != queued_ids_.end()) return store_.record(id);
    RunRecord r = store_.prepare(spec);
    queue_.push_back(spec);
    queued_ids_.push_back(id);
    wake_.notify_one();
    return r;
}

void Service::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [this] { return queue_.empty() && busy_ == 0; });
}

void Service::work() {
    for (;;) {
        RunSpec spec;
        {
            std::unique_lock lock(mutex_);
            wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            spec = std::move(queue_.front());
            queue_.pop_front();
            ++busy_;
        }
        const std::string id = run_id(spec);
        try {
            store_.execute(spec);
        } catch (const std::exception& e) {
            std::cerr << "run " << id << " failed: " << e.what() << "\n";
        }
        {
            std::lock_guard lock(mutex_);
            --busy_;
            std::erase(queued_ids_, id);
        }
        idle_.notify_all();
    }
}

void Service::mount(httplib::Server& server) {
    server.Post("/runs", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const RunRecord r = submit(spec_from_json(parse_body(req), {}));
            send(res, r.status == RunStatus::done ? 200 : 202, to_json(r));
        });
    });
    server.Get("/runs", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            Json runs = Json::array();
            for (const auto& r : store_.list()) runs.push_back(to_json(r));
            send(res, 200, {{"runs", std::move(runs)}});
        });
    });
    server.Get(R"(/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send(res, 200, to_json(store_.record(req.matches[1]))); });
    });
    server.Get(R"(/runs/([^/]+)/snapshots)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            long long after = -1;
            if (req.has_param("from")) {
                try {
                    after = std::stoll(req.get_param_value("from"));
                } catch (const std::exception&) {
                    throw ParseError("from", "expected an integer");
                }
            }
            const std::string id = req.matches[1];
            store_.record(id);
            Json snaps = Json::array();
            for (const auto& s : store_.load_snapshots(id, after)) {
                Json archive = Json::array();
                for (const auto& v : s.archive) archive.push_back(objectives_to_json(v));
                Json pop = Json::array();
                for (const auto& v : s.population) pop.push_back(objectives_to_json(v));
                snaps.push_back({{"evals", s.evals}, {"archive", std::move(archive)}, {"pop", std::move(pop)}});
            }
            send(res, 200, {{"run", id}, {"snapshots", std::move(snaps)}});
        });
    });
    server.Get(R"(/runs/([^/]+)/front)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string id = req.matches[1];
            const auto front = store_.load_front(id);
            Json solutions = Json::array();
            for (std::size_t i = 0; i < front.size(); ++i) solutions.push_back(solution_entry({id, i}, front[i].objectives));
            send(res, 200, {{"run", id}, {"objectives", kObjectiveNames}, {"solutions", std::move(solutions)}});
        });
    });
    server.Post(R"(/runs/([^/]+)/filter)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            FilterQuery q = filter_query_from_json(parse_body(req));
            q.run = req.matches[1];
            Json solutions = Json::array();
            for (const auto& s : filter_solutions(store_, q)) solutions.push_back(solution_entry(s.ref, s.objectives));
            send(res, 200, {{"solutions", std::move(solutions)}});
        });
    });
    server.Post("/reference-front/filter", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            FilterQuery q = filter_query_from_json(parse_body(req));
            if (q.reference_runs.empty())
                for (const auto& r : store_.list())
                    if (r.status == RunStatus::done) q.reference_runs.push_back(r.id);
            Json solutions = Json::array();
            for (const auto& s : filter_solutions(store_, q)) solutions.push_back(solution_entry(s.ref, s.objectives));
            send(res, 200, {{"solutions", std::move(solutions)}});
        });
    });
    server.Get(R"(/solutions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send(res, 200, to_json(solution_detail(store_, std::string(req.matches[1])))); });
    });
    server.Post(R"(/runs/([^/]+)/constrain)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const Json body = parse_body(req);
            std::vector<Pin> pins;
            if (auto p = body.find("pins"); p != body.end()) {
                if (!p->is_array()) throw ParseError("pins", "expected an array");
                for (std::size_t i = 0; i < p->size(); ++i)
                    pins.push_back(pin_from_json((*p)[i], "pins[" + std::to_string(i) + "]"));
            }
            const Json overrides = body.contains("overrides") ? body["overrides"] : Json(nullptr);
            const RunRecord r = submit(constrained_spec(store_, req.matches[1], pins, overrides));
            send(res, r.status == RunStatus::done ? 200 : 202, to_json(r));
        });
    });
    auto selected_runs = [this](const httplib::Request& req) {
        std::vector<std::string> ids;
        if (req.has_param("runs")) ids = split_runs(req.get_param_value("runs"));
        if (ids.empty())
            for (const auto& r : store_.list())
                if (r.status == RunStatus::done) ids.push_back(r.id);
        return ids;
    };
    server.Get("/reference-front", [this, selected_runs](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const StoreReference ref = reference_for(store_, selected_runs(req));
            Json solutions = Json::array();
            for (std::size_t i = 0; i < ref.front.points.size(); ++i) {
                ObjectiveVector v{};
                std::copy(ref.front.points[i].begin(), ref.front.points[i].end(), v.begin());
                solutions.push_back(solution_entry({ref.runs[ref.front.provenance[i]], ref.member[i]}, v));
            }
            send(res, 200, {{"runs", ref.runs}, {"solutions", std::move(solutions)}});
        });
    });
    server.Get("/indicators", [this, selected_runs](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::vector<std::string> ids = selected_runs(req);
            Json rows = Json::array();
            auto emit = [&](const IndicatorRow& row) {
                rows.push_back({{"run", row.run},
                                {"evals", row.evals},
                                {"hv", row.values.hv},
                                {"gd", row.values.gd},
                                {"igd", row.values.igd},
                                {"eps", row.values.eps},
                                {"spacing", row.values.spacing},
                                {"contribution", row.values.contribution}});
            };
            if (req.has_param("every")) {
                long long every = 0;
                try {
                    every = std::stoll(req.get_param_value("every"));
                } catch (const std::exception&) {
                    throw ParseError("every", "expected a positive integer");
                }
                if (every <= 0) throw ParseError("every", "expected a positive integer");
                indicator_report(store_, ids, static_cast<std::size_t>(every), emit);
            } else {
                const StoreReference ref = reference_for(store_, ids);
                for (std::size_t input = 0; input < ref.runs.size(); ++input) {
                    PointSet f;
                    for (const auto& m : store_.load_front(ref.runs[input]))
                        f.emplace_back(m.objectives.begin(), m.objectives.end());
                    emit({ref.runs[input], store_.record(ref.runs[input]).latest_eval,
                          compute_indicators(f, ref.front, input)});
                }
            }
            send(res, 200, {{"rows", std::move(rows)}});
        });
    });
}

int service_port() {
    if (const char* env = std::getenv("ARCHRECON_PORT")) {
        try {
            const int port = std::stoi(env);
            if (port > 0 && port < 65536) return port;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring invalid ARCHRECON_PORT '" << env << "'\n";
    }
    return 8080;
}

int serve(const std::filesystem::path& store_root, const std::string& host, int port, int workers) {
    Service service(store_root, workers);
    httplib::Server server;
    service.mount(server);
    std::cerr << "serving " << store_root.string() << " on " << host << ":" << port << "\n";
    return server.listen(host, port) ? 0 : 1;
}

}  // namespace archrecon
