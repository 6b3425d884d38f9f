#include "archrecon/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "archrecon/errors.hpp"

namespace archrecon {
namespace {

long long as_int(const Json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<long long>(d);
    }
    throw ParseError(path, "expected an integer");
}

double as_real(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path, "expected a number");
    return v.get<double>();
}

std::string as_string(const Json& v, const std::string& path) {
    if (!v.is_string()) throw ParseError(path, "expected a string");
    return v.get<std::string>();
}

}  // namespace

Json graph_to_json(const DependencyGraph& graph) {
    Json types = Json::array();
    for (const auto& n : graph.nodes())
        types.push_back({{"id", n.id}, {"name", n.fq_name}, {"package", n.origin_package}, {"abstract", n.is_abstract}});
    Json deps = Json::array();
    for (const auto& e : graph.edges()) deps.push_back({{"from", e.from}, {"to", e.to}});
    return {{"types", std::move(types)}, {"dependencies", std::move(deps)}};
}

Json pin_to_json(const Pin& pin) {
    Json j = {{"pattern", pin.pattern}};
    if (pin.package) j["package"] = *pin.package;
    if (pin.layer) j["layer"] = *pin.layer;
    return j;
}

Pin pin_from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    Pin pin;
    auto it = j.find("pattern");
    if (it == j.end()) throw ParseError(path + ".pattern", "missing field");
    pin.pattern = as_string(*it, path + ".pattern");
    if (pin.pattern.empty()) throw ParseError(path + ".pattern", "must be non-empty");
    if (auto p = j.find("package"); p != j.end() && !p->is_null())
        pin.package = static_cast<int>(as_int(*p, path + ".package"));
    if (auto l = j.find("layer"); l != j.end() && !l->is_null())
        pin.layer = static_cast<int>(as_int(*l, path + ".layer"));
    if (!pin.package && !pin.layer) throw ParseError(path, "pin needs a package or a layer target");
    return pin;
}

Json model_to_json(const ConceptualModel& model, const std::vector<Pin>& pins) {
    Json j = {{"style", std::string(to_string(model.style()))}, {"layers", model.layer_names()}};
    if (model.package_slots()) j["package_slots"] = *model.package_slots();
    Json p = Json::array();
    for (const auto& pin : pins) p.push_back(pin_to_json(pin));
    j["pins"] = std::move(p);
    return j;
}

Json config_to_json(const RunConfig& c) {
    return {{"algorithm", std::string(to_string(c.algorithm))},
            {"population", c.population},
            {"max_evaluations", c.max_evaluations},
            {"snapshot_interval", c.snapshot_interval},
            {"mutation_rate", c.mutation_rate},
            {"mutation_di", c.mutation_di},
            {"crossover_rate", c.crossover_rate},
            {"crossover_di", c.crossover_di},
            {"seed", c.seed},
            {"scenario", c.scenario},
            {"aggregation", std::string(to_string(c.aggregation))},
            {"epsilon", c.epsilon},
            {"de_crossover", c.de_crossover},
            {"de_scale", c.de_scale}};
}

RunConfig config_from_json(const Json& j, RunConfig c) {
    if (!j.is_object()) throw ParseError("config", "expected an object");
    for (const auto& [key, v] : j.items()) {
        const std::string path = "config." + key;
        try {
            if (key == "algorithm") c.algorithm = parse_algorithm(as_string(v, path));
            else if (key == "population") c.population = static_cast<int>(as_int(v, path));
            else if (key == "max_evaluations") c.max_evaluations = as_int(v, path);
            else if (key == "snapshot_interval") c.snapshot_interval = as_int(v, path);
            else if (key == "mutation_rate") c.mutation_rate = as_real(v, path);
            else if (key == "mutation_di") c.mutation_di = as_real(v, path);
            else if (key == "crossover_rate") c.crossover_rate = as_real(v, path);
            else if (key == "crossover_di") c.crossover_di = as_real(v, path);
            else if (key == "seed") {
                const long long s = as_int(v, path);
                if (s < 0) throw ParseError(path, "must be non-negative");
                c.seed = static_cast<std::uint64_t>(s);
            } else if (key == "scenario") c.scenario = as_string(v, path);
            else if (key == "aggregation") c.aggregation = parse_aggregation(as_string(v, path));
            else if (key == "epsilon") c.epsilon = as_real(v, path);
            else if (key == "de_crossover") c.de_crossover = as_real(v, path);
            else if (key == "de_scale") c.de_scale = as_real(v, path);
            else throw ParseError(path, "unknown config key");
        } catch (const ContractViolation& e) {
            throw ParseError(path, e.what());
        }
    }
    return c;
}

Json objectives_to_json(const ObjectiveVector& v) {
    Json j = Json::array();
    for (double x : v) j.push_back(x);
    return j;
}

ObjectiveVector objectives_from_json(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != kObjectiveCount)
        throw ParseError(path, "expected " + std::to_string(kObjectiveCount) + " objective values");
    ObjectiveVector v{};
    for (std::size_t k = 0; k < kObjectiveCount; ++k) v[k] = as_real(j[k], path + "[" + std::to_string(k) + "]");
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreError("cannot write " + tmp);
        out << content;
        if (!out.flush()) throw StoreError("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace archrecon
