#include "archrecon/graph.hpp"

#include <algorithm>
#include <fnmatch.h>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "archrecon/errors.hpp"

namespace archrecon {

using nlohmann::json;

namespace {

std::string line_col(std::string_view doc, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < doc.size(); ++i) {
        if (doc[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(std::string_view document) {
    try {
        return json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        // nlohmann reports the byte *after* the offending character.
        std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ParseError(line_col(document, byte), "invalid JSON");
    }
}

const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path, std::string("missing field '") + key + "'");
    return *it;
}

long long require_int(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_integer()) throw ParseError(path + "." + key, "expected an integer");
    return v.get<long long>();
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) throw ParseError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::optional<int> optional_int(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) throw ParseError(path + "." + key, "expected an integer");
    return it->get<int>();
}

}  // namespace

DependencyGraph::DependencyGraph(std::vector<TypeNode> nodes, std::vector<Edge> edges) {
    const auto n = static_cast<long long>(nodes.size());
    std::vector<bool> seen(nodes.size(), false);
    for (const auto& node : nodes) {
        if (node.id < 0 || node.id >= n)
            throw ParseError("types", "id " + std::to_string(node.id) + " outside [0, " +
                                          std::to_string(n) + ")");
        if (seen[static_cast<std::size_t>(node.id)])
            throw ParseError("types", "duplicate id " + std::to_string(node.id));
        seen[static_cast<std::size_t>(node.id)] = true;
        if (node.fq_name.empty()) throw ParseError("types", "empty name for id " + std::to_string(node.id));
        if (node.origin_package.empty())
            throw ParseError("types", "empty package for id " + std::to_string(node.id));
    }
    std::sort(nodes.begin(), nodes.end(), [](const TypeNode& a, const TypeNode& b) { return a.id < b.id; });
    nodes_ = std::move(nodes);

    for (const auto& e : edges) {
        for (int id : {e.from, e.to}) {
            if (id < 0 || id >= n)
                throw ReferenceError(id, "dependency references unknown type id " + std::to_string(id));
        }
    }
    std::erase_if(edges, [](const Edge& e) { return e.from == e.to; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    std::set<std::string> names;
    for (const auto& node : nodes_) names.insert(node.origin_package);
    origin_packages_.assign(names.begin(), names.end());
    origin_slot_.reserve(nodes_.size());
    for (const auto& node : nodes_) {
        auto it = std::lower_bound(origin_packages_.begin(), origin_packages_.end(), node.origin_package);
        origin_slot_.push_back(static_cast<int>(it - origin_packages_.begin()));
    }
}

std::string_view to_string(LayerStyle style) noexcept {
    return style == LayerStyle::transient ? "transient" : "strict";
}

LayerStyle parse_layer_style(std::string_view token) {
    if (token == "transient") return LayerStyle::transient;
    if (token == "strict") return LayerStyle::strict;
    throw ParseError("style", "unknown style '" + std::string(token) + "' (expected transient|strict)");
}

ConceptualModel::ConceptualModel(LayerStyle style, std::vector<std::string> layer_names,
                                 std::optional<int> package_slots)
    : style_(style), layer_names_(std::move(layer_names)), package_slots_(package_slots) {
    if (layer_names_.size() < 2) throw ParseError("layers", "a model needs at least 2 layers");
    std::set<std::string> unique(layer_names_.begin(), layer_names_.end());
    if (unique.size() != layer_names_.size()) throw ParseError("layers", "layer names must be unique");
    if (package_slots_ && *package_slots_ < 1) throw ParseError("package_slots", "must be positive");
}

ConceptualModel ConceptualModel::with_style(LayerStyle style) const {
    ConceptualModel copy = *this;
    copy.style_ = style;
    return copy;
}

std::string Pin::describe() const {
    std::string s = "pin '" + pattern + "'";
    if (package) s += " -> package " + std::to_string(*package);
    if (layer) s += " -> layer " + std::to_string(*layer);
    return s;
}

PinTable::PinTable(std::size_t units, std::size_t packages)
    : unit_package(units),
      unit_layer(units),
      package_layer(packages),
      unit_package_source(units, -1),
      unit_layer_source(units, -1),
      package_layer_source(packages, -1) {}

std::size_t PinTable::pinned_unit_count() const noexcept {
    std::size_t count = 0;
    for (std::size_t u = 0; u < unit_package.size(); ++u)
        if (unit_package[u] || unit_layer[u]) ++count;
    return count;
}

std::size_t PinTable::pinned_package_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(package_layer.begin(), package_layer.end(), [](const auto& v) { return v.has_value(); }));
}

std::size_t PackageGraph::edge_count() const noexcept {
    std::size_t count = 0;
    for (const auto& adj : out) count += adj.size();
    return count;
}

std::vector<Edge> PackageGraph::package_edges() const {
    std::vector<Edge> result;
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int j : out[i]) result.push_back({packages[i], packages[static_cast<std::size_t>(j)]});
    return result;
}

DependencyGraph parse_graph(std::string_view document) {
    const json doc = parse_json(document);
    if (!doc.is_object()) throw ParseError("$", "graph document must be an object");
    const json& types = require(doc, "types", "$");
    if (!types.is_array()) throw ParseError("types", "expected an array");
    if (types.empty()) throw ParseError("types", "graph must contain at least one type");

    std::vector<TypeNode> nodes;
    nodes.reserve(types.size());
    for (std::size_t i = 0; i < types.size(); ++i) {
        const std::string path = "types[" + std::to_string(i) + "]";
        const json& t = types[i];
        if (!t.is_object()) throw ParseError(path, "expected an object");
        TypeNode node;
        const long long id = require_int(t, "id", path);
        if (id < 0 || id > std::numeric_limits<int>::max()) throw ParseError(path + ".id", "id out of range");
        node.id = static_cast<int>(id);
        node.fq_name = require_string(t, "name", path);
        node.origin_package = require_string(t, "package", path);
        if (node.fq_name.empty()) throw ParseError(path + ".name", "must be non-empty");
        if (node.origin_package.empty()) throw ParseError(path + ".package", "must be non-empty");
        if (auto it = t.find("abstract"); it != t.end()) {
            if (!it->is_boolean()) throw ParseError(path + ".abstract", "expected a boolean");
            node.is_abstract = it->get<bool>();
        }
        nodes.push_back(std::move(node));
    }

    std::vector<Edge> edges;
    if (auto it = doc.find("dependencies"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("dependencies", "expected an array");
        edges.reserve(it->size());
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "dependencies[" + std::to_string(i) + "]";
            const json& d = (*it)[i];
            if (!d.is_object()) throw ParseError(path, "expected an object");
            const long long from = require_int(d, "from", path);
            const long long to = require_int(d, "to", path);
            for (long long id : {from, to}) {
                if (id < 0 || id >= static_cast<long long>(nodes.size()))
                    throw ReferenceError(id, path + ": unknown type id " + std::to_string(id));
            }
            edges.push_back({static_cast<int>(from), static_cast<int>(to)});
        }
    }
    return DependencyGraph(std::move(nodes), std::move(edges));
}

ModelDocument parse_model(std::string_view document) {
    const json doc = parse_json(document);
    if (!doc.is_object()) throw ParseError("$", "model document must be an object");
    const LayerStyle style = parse_layer_style(require_string(doc, "style", "$"));

    const json& layers = require(doc, "layers", "$");
    if (!layers.is_array()) throw ParseError("layers", "expected an array");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (!layers[i].is_string()) throw ParseError("layers[" + std::to_string(i) + "]", "expected a string");
        names.push_back(layers[i].get<std::string>());
    }
    const std::optional<int> slots = optional_int(doc, "package_slots", "$");

    ModelDocument result{ConceptualModel(style, std::move(names), slots), {}};

    if (auto it = doc.find("pins"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("pins", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "pins[" + std::to_string(i) + "]";
            const json& p = (*it)[i];
            if (!p.is_object()) throw ParseError(path, "expected an object");
            Pin pin;
            pin.pattern = require_string(p, "pattern", path);
            if (pin.pattern.empty()) throw ParseError(path + ".pattern", "must be non-empty");
            pin.package = optional_int(p, "package", path);
            pin.layer = optional_int(p, "layer", path);
            if (!pin.package && !pin.layer) throw ParseError(path, "pin needs a package or a layer target");
            if (pin.layer && (*pin.layer < 0 || *pin.layer >= result.model.layer_count()))
                throw ParseError(path + ".layer", "layer index out of range");
            if (pin.package && *pin.package < 0) throw ParseError(path + ".package", "negative package index");
            result.pins.push_back(std::move(pin));
        }
    }
    return result;
}

int resolve_package_slots(const DependencyGraph& graph, const ConceptualModel& model) {
    return model.package_slots().value_or(static_cast<int>(graph.origin_packages().size()));
}

std::string package_slot_name(const DependencyGraph& graph, int slot) {
    if (slot >= 0 && static_cast<std::size_t>(slot) < graph.origin_packages().size())
        return graph.origin_packages()[static_cast<std::size_t>(slot)];
    return "slot" + std::to_string(slot);
}

bool glob_match(std::string_view pattern, std::string_view text) {
    return ::fnmatch(std::string(pattern).c_str(), std::string(text).c_str(), 0) == 0;
}

PinTable bind_pins(const std::vector<Pin>& pins, const DependencyGraph& graph, const ConceptualModel& model) {
    return bind_pins(pins, graph, model, resolve_package_slots(graph, model));
}

PinTable bind_pins(const std::vector<Pin>& pins, const DependencyGraph& graph, const ConceptualModel& model,
                   int package_slots) {
    const std::size_t units = graph.unit_count();
    const auto slots = static_cast<std::size_t>(package_slots);
    PinTable table(units, slots);

    auto conflict = [&](int a, int b, const std::string& what) -> PinConflictError {
        const std::string first = pins[static_cast<std::size_t>(a)].describe();
        const std::string second = pins[static_cast<std::size_t>(b)].describe();
        return PinConflictError(first, second, "conflicting pins: " + first + " and " + second + " (" + what + ")");
    };
    auto set_package_layer = [&](std::size_t pkg, int layer, int source) {
        auto& slot = table.package_layer[pkg];
        if (slot && *slot != layer)
            throw conflict(table.package_layer_source[pkg], source, "package " + std::to_string(pkg));
        if (!slot) {
            slot = layer;
            table.package_layer_source[pkg] = source;
        }
    };

    for (std::size_t i = 0; i < pins.size(); ++i) {
        const Pin& pin = pins[i];
        const int src = static_cast<int>(i);
        if (!pin.package && !pin.layer) throw BindingError(pin.describe() + " has no target");
        if (pin.package && (*pin.package < 0 || *pin.package >= package_slots))
            throw BindingError(pin.describe() + ": package index outside [0, " + std::to_string(package_slots) + ")");
        if (pin.layer && (*pin.layer < 0 || *pin.layer >= model.layer_count()))
            throw BindingError(pin.describe() + ": layer index outside [0, " +
                               std::to_string(model.layer_count()) + ")");

        std::size_t matched = 0;
        for (const auto& node : graph.nodes()) {
            if (!glob_match(pin.pattern, node.fq_name)) continue;
            ++matched;
            const auto u = static_cast<std::size_t>(node.id);
            if (pin.package) {
                auto& slot = table.unit_package[u];
                if (slot && *slot != *pin.package)
                    throw conflict(table.unit_package_source[u], src, "unit " + node.fq_name);
                if (!slot) {
                    slot = *pin.package;
                    table.unit_package_source[u] = src;
                }
            }
            if (pin.layer) {
                auto& slot = table.unit_layer[u];
                if (slot && *slot != *pin.layer)
                    throw conflict(table.unit_layer_source[u], src, "unit " + node.fq_name);
                if (!slot) {
                    slot = *pin.layer;
                    table.unit_layer_source[u] = src;
                }
            }
        }
        // Package slots take layer targets only.
        if (pin.layer) {
            for (std::size_t k = 0; k < slots; ++k) {
                if (!glob_match(pin.pattern, package_slot_name(graph, static_cast<int>(k)))) continue;
                ++matched;
                set_package_layer(k, *pin.layer, src);
            }
        }
        if (matched == 0) throw BindingError(pin.describe() + " matches no type and no package");
    }

    // A unit pinned to both a package and a layer fixes that package's layer.
    for (std::size_t u = 0; u < units; ++u) {
        if (table.unit_package[u] && table.unit_layer[u])
            set_package_layer(static_cast<std::size_t>(*table.unit_package[u]), *table.unit_layer[u],
                              table.unit_layer_source[u]);
    }

    // Layer-only unit pins need a package in the target layer. Layers not
    // covered by a pinned package each consume one free package slot.
    std::set<int> wanted;
    for (std::size_t u = 0; u < units; ++u)
        if (table.unit_layer[u] && !table.unit_package[u]) wanted.insert(*table.unit_layer[u]);
    std::size_t free_slots = 0;
    for (std::size_t k = 0; k < slots; ++k) {
        if (table.package_layer[k])
            wanted.erase(*table.package_layer[k]);
        else
            ++free_slots;
    }
    if (wanted.size() > free_slots)
        throw BindingError("layer pins need " + std::to_string(wanted.size()) +
                           " more packages than are free to place");
    return table;
}

PackageGraph package_graph(const DependencyGraph& graph, const ArchitectureSolution& sol) {
    const std::size_t slots = sol.package_slots();
    std::vector<int> local(slots, -1);
    for (int p : sol.unit_to_package) local[static_cast<std::size_t>(p)] = 0;

    PackageGraph pg;
    for (std::size_t k = 0; k < slots; ++k) {
        if (local[k] < 0) continue;
        local[k] = static_cast<int>(pg.packages.size());
        pg.packages.push_back(static_cast<int>(k));
    }
    const std::size_t n = pg.packages.size();
    std::vector<char> adjacency(n * n, 0);
    for (const Edge& e : graph.edges()) {
        const int p = local[static_cast<std::size_t>(sol.unit_to_package[static_cast<std::size_t>(e.from)])];
        const int q = local[static_cast<std::size_t>(sol.unit_to_package[static_cast<std::size_t>(e.to)])];
        if (p != q) adjacency[static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)] = 1;
    }
    pg.out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adjacency[i * n + j]) pg.out[i].push_back(static_cast<int>(j));
    return pg;
}

std::vector<int> package_sizes(const ArchitectureSolution& sol, std::size_t units) {
    std::vector<int> sizes(sol.package_slots(), 0);
    for (std::size_t u = 0; u < units; ++u) ++sizes[static_cast<std::size_t>(sol.unit_to_package[u])];
    return sizes;
}

}  // namespace archrecon
