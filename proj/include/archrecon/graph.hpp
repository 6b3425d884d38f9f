#pragma once

#include <cstddef>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace archrecon {

/// A compilation unit (type-level artifact).
struct TypeNode {
    int id = 0;
    std::string fq_name;
    std::string origin_package;
    bool is_abstract = false;
};

struct Edge {
    int from = 0;
    int to = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Immutable type-level dependency graph. Node ids are dense in [0, U);
/// edges are sorted, unique and never self-loops.
class DependencyGraph {
public:
    DependencyGraph() = default;

    /// Validates ids, drops self-edges and collapses duplicate edges.
    /// Nodes may arrive in any order; they are stored indexed by id.
    /// Throws ParseError on bad ids, ReferenceError on dangling edges.
    DependencyGraph(std::vector<TypeNode> nodes, std::vector<Edge> edges);

    std::size_t unit_count() const noexcept { return nodes_.size(); }
    const std::vector<TypeNode>& nodes() const noexcept { return nodes_; }
    const TypeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Distinct origin package names, sorted. Position = default package slot.
    const std::vector<std::string>& origin_packages() const noexcept { return origin_packages_; }
    /// Slot index of the unit's origin package within origin_packages().
    int origin_slot(int unit) const { return origin_slot_.at(static_cast<std::size_t>(unit)); }

private:
    std::vector<TypeNode> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::string> origin_packages_;
    std::vector<int> origin_slot_;
};

enum class LayerStyle { transient, strict };

std::string_view to_string(LayerStyle style) noexcept;
LayerStyle parse_layer_style(std::string_view token);

/// Ordered layers, index 0 on top. Same-layer access is always allowed.
class ConceptualModel {
public:
    ConceptualModel() = default;
    ConceptualModel(LayerStyle style, std::vector<std::string> layer_names,
                    std::optional<int> package_slots = std::nullopt);

    LayerStyle style() const noexcept { return style_; }
    const std::vector<std::string>& layer_names() const noexcept { return layer_names_; }
    int layer_count() const noexcept { return static_cast<int>(layer_names_.size()); }
    std::optional<int> package_slots() const noexcept { return package_slots_; }

    bool allowed(int from_layer, int to_layer) const noexcept {
        if (from_layer == to_layer) return true;
        if (style_ == LayerStyle::transient) return to_layer > from_layer;
        return to_layer == from_layer + 1;
    }

    /// Same layers, different access rule.
    ConceptualModel with_style(LayerStyle style) const;

private:
    LayerStyle style_ = LayerStyle::transient;
    std::vector<std::string> layer_names_;
    std::optional<int> package_slots_;
};

/// Assignment fixed by the architect. A glob pattern is matched against unit
/// names and against package slot names.
struct Pin {
    std::string pattern;
    std::optional<int> package;
    std::optional<int> layer;

    std::string describe() const;
    bool operator==(const Pin&) const = default;
};

struct ModelDocument {
    ConceptualModel model;
    std::vector<Pin> pins;
};

/// Pins resolved to concrete units and package slots. Every vector is total;
/// an empty optional means "not pinned". `*_source` holds the index of the pin
/// that produced each entry (-1 when unpinned).
struct PinTable {
    std::vector<std::optional<int>> unit_package;
    std::vector<std::optional<int>> unit_layer;
    std::vector<std::optional<int>> package_layer;
    std::vector<int> unit_package_source;
    std::vector<int> unit_layer_source;
    std::vector<int> package_layer_source;

    PinTable() = default;
    PinTable(std::size_t units, std::size_t packages);

    std::size_t pinned_unit_count() const noexcept;
    std::size_t pinned_package_count() const noexcept;
    bool empty() const noexcept { return pinned_unit_count() == 0 && pinned_package_count() == 0; }
};

struct ArchitectureSolution {
    std::vector<int> unit_to_package;
    std::vector<int> package_to_layer;

    int layer_of_unit(int unit) const {
        return package_to_layer[static_cast<std::size_t>(unit_to_package[static_cast<std::size_t>(unit)])];
    }
    std::size_t package_slots() const noexcept { return package_to_layer.size(); }
    bool operator==(const ArchitectureSolution&) const = default;
};

/// Directed graph over the non-empty packages of a solution. Nodes are
/// addressed locally by position in `packages`; `out[i]` is sorted and unique.
struct PackageGraph {
    std::vector<int> packages;
    std::vector<std::vector<int>> out;

    std::size_t node_count() const noexcept { return packages.size(); }
    std::size_t edge_count() const noexcept;
    /// Edges as (package id, package id), ascending.
    std::vector<Edge> package_edges() const;
};

DependencyGraph parse_graph(std::string_view document);
ModelDocument parse_model(std::string_view document);

/// Number of package slots for a graph/model pair: the model's explicit
/// value, else the number of distinct origin packages.
int resolve_package_slots(const DependencyGraph& graph, const ConceptualModel& model);

/// Name used for glob matching of a package slot: the origin package name for
/// slots that have one, "slot<k>" otherwise.
std::string package_slot_name(const DependencyGraph& graph, int slot);

/// Shell-style glob (`*`, `?`, `[...]`).
bool glob_match(std::string_view pattern, std::string_view text);

PinTable bind_pins(const std::vector<Pin>& pins, const DependencyGraph& graph,
                   const ConceptualModel& model);
PinTable bind_pins(const std::vector<Pin>& pins, const DependencyGraph& graph,
                   const ConceptualModel& model, int package_slots);

PackageGraph package_graph(const DependencyGraph& graph, const ArchitectureSolution& sol);

/// Unit count of each of the solution's package slots, empty slots included.
std::vector<int> package_sizes(const ArchitectureSolution& sol, std::size_t units);

}  // namespace archrecon
