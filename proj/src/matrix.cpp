#include "archrecon/matrix.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "archrecon/errors.hpp"
#include "archrecon/io.hpp"

namespace archrecon {
namespace fs = std::filesystem;
namespace {

const Json& require_array(const Json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ParseError(key, "missing field");
    if (!it->is_array() || it->empty()) throw ParseError(key, "expected a non-empty array");
    return *it;
}

std::vector<std::string> string_list(const Json& doc, const char* key) {
    std::vector<std::string> out;
    const Json& arr = require_array(doc, key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) throw ParseError(std::string(key) + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(arr[i].get<std::string>());
    }
    return out;
}

MatrixSystem::Synthetic parse_synthetic(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    MatrixSystem::Synthetic s;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "units") s.units = v.get<int>();
            else if (key == "packages") s.packages = v.get<int>();
            else if (key == "layers") s.layers = v.get<int>();
            else if (key == "noise") s.noise = v.get<double>();
            else if (key == "seed") s.seed = v.get<std::uint64_t>();
            else throw ParseError(path + "." + key, "unknown key");
        }
    } catch (const Json::exception& e) {
        throw ParseError(path, e.what());
    }
    return s;
}

std::string label_of(const RunRecord& r, SliceBy by) {
    switch (by) {
        case SliceBy::algorithm: return std::string(to_string(r.config.algorithm));
        case SliceBy::system: return r.system;
        case SliceBy::scenario: return r.config.scenario;
    }
    return {};
}

}  // namespace

ExperimentMatrix parse_matrix(std::string_view document, const fs::path& base_dir) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const Json::parse_error& e) {
        throw ParseError("matrix", e.what());
    }
    if (!doc.is_object()) throw ParseError("$", "matrix document must be an object");
    ExperimentMatrix m;
    m.algorithms = string_list(doc, "algorithms");
    for (const auto& a : m.algorithms) {
        try {
            parse_algorithm(a);
        } catch (const ContractViolation& e) {
            throw ParseError("algorithms", e.what());
        }
    }
    m.scenarios = string_list(doc, "scenarios");
    for (const auto& s : m.scenarios) {
        try {
            parse_scenario(s);
        } catch (const ContractViolation& e) {
            throw ParseError("scenarios", e.what());
        }
    }

    auto seeds = doc.find("seeds");
    if (seeds == doc.end()) {
        for (std::uint64_t s = 0; s < 10; ++s) m.seeds.push_back(s);
    } else if (seeds->is_number_unsigned() || seeds->is_number_integer()) {
        const long long n = seeds->get<long long>();
        if (n <= 0) throw ParseError("seeds", "must be positive");
        for (long long s = 0; s < n; ++s) m.seeds.push_back(static_cast<std::uint64_t>(s));
    } else if (seeds->is_array() && !seeds->empty()) {
        for (const auto& s : *seeds) {
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
                throw ParseError("seeds", "expected non-negative integers");
            m.seeds.push_back(s.get<std::uint64_t>());
        }
    } else {
        throw ParseError("seeds", "expected a count or a non-empty list");
    }

    const Json& systems = require_array(doc, "systems");
    for (std::size_t i = 0; i < systems.size(); ++i) {
        const std::string path = "systems[" + std::to_string(i) + "]";
        const Json& s = systems[i];
        if (!s.is_object()) throw ParseError(path, "expected an object");
        MatrixSystem sys;
        sys.name = s.value("name", "system" + std::to_string(i));
        if (auto syn = s.find("synthetic"); syn != s.end()) {
            sys.synthetic = parse_synthetic(*syn, path + ".synthetic");
        } else {
            if (!s.contains("graph") || !s["graph"].is_string()) throw ParseError(path + ".graph", "expected a path");
            if (!s.contains("model") || !s["model"].is_string()) throw ParseError(path + ".model", "expected a path");
            sys.graph = base_dir / s["graph"].get<std::string>();
            sys.model = base_dir / s["model"].get<std::string>();
        }
        m.systems.push_back(std::move(sys));
    }
    if (auto c = doc.find("config"); c != doc.end()) m.base = config_from_json(*c);
    return m;
}

std::vector<RunSpec> expand_matrix(const ExperimentMatrix& matrix) {
    std::vector<RunSpec> specs;
    specs.reserve(matrix.run_count());
    for (const auto& sys : matrix.systems) {
        DependencyGraph graph;
        ModelDocument doc;
        if (sys.synthetic) {
            const auto& s = *sys.synthetic;
            SyntheticSystem generated = make_synthetic_system(s.units, s.packages, s.layers, s.noise, s.seed);
            graph = std::move(generated.graph);
            doc.model = std::move(generated.model);
        } else {
            graph = parse_graph(read_file(sys.graph.string()));
            doc = parse_model(read_file(sys.model.string()));
        }
        for (const auto& algorithm : matrix.algorithms)
            for (const auto& scen : matrix.scenarios)
                for (std::uint64_t seed : matrix.seeds) {
                    RunSpec spec{graph, doc.model, doc.pins, matrix.base, sys.name};
                    spec.config.algorithm = parse_algorithm(algorithm);
                    spec.config.scenario = scen;
                    spec.config.seed = seed;
                    specs.push_back(std::move(spec));
                }
    }
    return specs;
}

MatrixReport run_matrix(const std::vector<RunSpec>& specs, ResultStore& store, const MatrixOptions& options) {
    MatrixReport report;
    report.run_ids.reserve(specs.size());
    for (const auto& spec : specs) report.run_ids.push_back(run_id(spec));

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (store.is_complete(report.run_ids[i])) {
            ++report.skipped;
            continue;
        }
        pending.push_back(i);
    }
    // Identical specs in one matrix collapse to the first occurrence.
    std::vector<std::size_t> unique;
    for (std::size_t i : pending) {
        const bool seen = std::any_of(unique.begin(), unique.end(),
                                      [&](std::size_t j) { return report.run_ids[j] == report.run_ids[i]; });
        if (seen) ++report.skipped;
        else unique.push_back(i);
    }
    if (options.max_runs && unique.size() > *options.max_runs) unique.resize(*options.max_runs);

    std::atomic<std::size_t> next{0};
    std::mutex guard;
    std::exception_ptr fatal;
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= unique.size()) return;
            {
                std::lock_guard lock(guard);
                if (fatal) return;
            }
            const std::size_t i = unique[k];
            try {
                store.execute(specs[i]);
                std::lock_guard lock(guard);
                ++report.executed;
            } catch (const StoreError&) {
                std::lock_guard lock(guard);
                if (!fatal) fatal = std::current_exception();
            } catch (const std::exception& e) {
                std::lock_guard lock(guard);
                ++report.executed;
                report.failures.emplace_back(report.run_ids[i], e.what());
            }
        }
    };
    const int count = std::max(1, std::min<int>(options.workers, static_cast<int>(unique.size())));
    std::vector<std::thread> threads;
    for (int t = 1; t < count; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (fatal) std::rethrow_exception(fatal);
    std::sort(report.failures.begin(), report.failures.end());
    return report;
}

std::string_view to_string(SliceBy by) noexcept {
    switch (by) {
        case SliceBy::algorithm: return "algorithm";
        case SliceBy::system: return "system";
        case SliceBy::scenario: return "scenario";
    }
    return "unknown";
}

SliceBy parse_slice_by(std::string_view token) {
    if (token == "algorithm") return SliceBy::algorithm;
    if (token == "system") return SliceBy::system;
    if (token == "scenario") return SliceBy::scenario;
    throw ContractViolation("unknown slice '" + std::string(token) + "' (expected algorithm|system|scenario)");
}

StatsResult descriptive_stats(const ResultStore& store, const std::vector<RunRecord>& runs, SliceBy by,
                              std::size_t objective) {
    if (objective >= kObjectiveCount) throw ContractViolation("objective index out of range");
    std::map<std::string, std::vector<double>> pooled;
    for (const auto& r : runs) {
        auto& values = pooled[label_of(r, by)];
        if (r.status != RunStatus::done) continue;
        for (const auto& m : store.load_front(r.id)) values.push_back(m.objectives[objective]);
    }
    StatsResult result;
    std::vector<std::vector<double>> groups;
    const std::string metric(kObjectiveNames[objective]);
    for (auto& [slice, values] : pooled) {
        if (values.empty()) {
            result.warnings.push_back("slice '" + slice + "' has no completed solutions; omitted");
            continue;
        }
        groups.push_back(values);
        result.rows.push_back({slice, metric, summarize(std::move(values))});
    }
    if (groups.size() >= 2) result.test = kruskal_wallis(groups);
    return result;
}

std::string stats_csv(const std::vector<StatRow>& rows) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    auto num = [](double v) {
        Json j = v;
        return j.dump();
    };
    std::string out = "slice,metric,min,max,median,n\n";
    for (const auto& r : rows)
        out += quote(r.slice) + "," + quote(r.metric) + "," + num(r.summary.min) + "," + num(r.summary.max) + "," +
               num(r.summary.median) + "," + std::to_string(r.summary.n) + "\n";
    return out;
}

StoreReference reference_for(const ResultStore& store, std::vector<std::string> run_ids) {
    std::sort(run_ids.begin(), run_ids.end());
    run_ids.erase(std::unique(run_ids.begin(), run_ids.end()), run_ids.end());
    if (run_ids.empty()) throw ContractViolation("reference front needs at least one run");
    StoreReference ref;
    std::vector<PointSet> fronts;
    for (const auto& id : run_ids) {
        PointSet f;
        for (const auto& m : store.load_front(id)) f.emplace_back(m.objectives.begin(), m.objectives.end());
        fronts.push_back(std::move(f));
    }
    ref.front = build_reference_front(fronts);
    // Recover each point's index within its run's front.
    for (std::size_t i = 0; i < ref.front.points.size(); ++i) {
        const PointSet& f = fronts[ref.front.provenance[i]];
        const auto it = std::find(f.begin(), f.end(), ref.front.points[i]);
        ref.member.push_back(static_cast<std::size_t>(it - f.begin()));
    }
    ref.runs = std::move(run_ids);
    return ref;
}

void indicator_report(const ResultStore& store, const std::vector<std::string>& run_ids, std::size_t every,
                      const std::function<void(const IndicatorRow&)>& emit) {
    if (every == 0) throw ContractViolation("snapshot stride must be positive");
    const StoreReference ref = reference_for(store, run_ids);
    for (std::size_t input = 0; input < ref.runs.size(); ++input) {
        const std::string& id = ref.runs[input];
        std::optional<StoredSnapshot> last;
        bool last_emitted = false;
        std::size_t index = 0;
        auto report = [&](const StoredSnapshot& s) {
            PointSet f;
            for (const auto& v : s.archive) f.emplace_back(v.begin(), v.end());
            emit({id, s.evals, compute_indicators(f, ref.front, input)});
        };
        store.for_each_snapshot(id, [&](const StoredSnapshot& s) {
            last_emitted = index % every == 0;
            if (last_emitted) report(s);
            last = s;
            ++index;
        });
        if (last && !last_emitted) report(*last);
    }
}

}  // namespace archrecon
