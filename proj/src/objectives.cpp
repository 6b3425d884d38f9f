#include "archrecon/objectives.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "archrecon/errors.hpp"

namespace archrecon {

namespace {

double fold(double total, std::size_t count, Aggregation agg) {
    if (agg == Aggregation::sum) return total;
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

std::vector<int> in_degrees(const PackageGraph& pg) {
    std::vector<int> in(pg.node_count(), 0);
    for (const auto& adj : pg.out)
        for (int j : adj) ++in[static_cast<std::size_t>(j)];
    return in;
}

}  // namespace

std::optional<std::size_t> objective_index(std::string_view name) {
    for (std::size_t i = 0; i < kObjectiveNames.size(); ++i)
        if (kObjectiveNames[i] == name) return i;
    if (name == "cohesion") return 0;
    if (name == "nccd") return 1;
    if (name == "cycles") return 6;
    if (name == "range") return 7;
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), index);
    if (ec == std::errc() && ptr == name.data() + name.size() && index < kObjectiveCount) return index;
    return std::nullopt;
}

std::string_view to_string(Aggregation agg) noexcept { return agg == Aggregation::mean ? "mean" : "sum"; }

Aggregation parse_aggregation(std::string_view token) {
    if (token == "mean") return Aggregation::mean;
    if (token == "sum") return Aggregation::sum;
    throw ContractViolation("unknown aggregation '" + std::string(token) + "' (expected mean|sum)");
}

double relational_cohesion(const DependencyGraph& graph, const ArchitectureSolution& sol, Aggregation agg) {
    const std::size_t slots = sol.package_slots();
    std::vector<int> units(slots, 0);
    std::vector<int> internal(slots, 0);
    for (int p : sol.unit_to_package) ++units[static_cast<std::size_t>(p)];
    for (const Edge& e : graph.edges()) {
        const int p = sol.unit_to_package[static_cast<std::size_t>(e.from)];
        if (p == sol.unit_to_package[static_cast<std::size_t>(e.to)]) ++internal[static_cast<std::size_t>(p)];
    }
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < slots; ++k) {
        if (units[k] == 0) continue;
        total += (internal[k] + 1.0) / units[k];
        ++count;
    }
    return fold(total, count, agg);
}

double balanced_ccd(std::size_t n) {
    const double m = static_cast<double>(n);
    return (m + 1.0) * std::log2(m + 1.0) - m;
}

double nccd(const PackageGraph& pg) {
    const std::size_t n = pg.node_count();
    if (n == 0) return 1.0;
    std::size_t ccd = 0;
    std::vector<char> seen(n);
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(seen.begin(), seen.end(), 0);
        seen[s] = 1;
        stack.assign(1, static_cast<int>(s));
        std::size_t reached = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : pg.out[static_cast<std::size_t>(v)]) {
                if (seen[static_cast<std::size_t>(w)]) continue;
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
        ccd += reached;
    }
    return static_cast<double>(ccd) / balanced_ccd(n);
}

double efferent_coupling(const PackageGraph& pg, Aggregation agg) {
    return fold(static_cast<double>(pg.edge_count()), pg.node_count(), agg);
}

double afferent_coupling(const PackageGraph& pg, Aggregation agg) {
    // Every edge is one efferent and one afferent relation.
    return fold(static_cast<double>(pg.edge_count()), pg.node_count(), agg);
}

double distance(const DependencyGraph& graph, const PackageGraph& pg, const ArchitectureSolution& sol,
                Aggregation agg) {
    const std::size_t slots = sol.package_slots();
    std::vector<int> units(slots, 0);
    std::vector<int> abstract(slots, 0);
    for (std::size_t u = 0; u < sol.unit_to_package.size(); ++u) {
        const auto p = static_cast<std::size_t>(sol.unit_to_package[u]);
        ++units[p];
        if (graph.nodes()[u].is_abstract) ++abstract[p];
    }
    const std::vector<int> in = in_degrees(pg);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pg.node_count(); ++i) {
        const double ce = static_cast<double>(pg.out[i].size());
        const double ca = static_cast<double>(in[i]);
        if (ce + ca == 0.0) continue;
        const auto p = static_cast<std::size_t>(pg.packages[i]);
        const double a = static_cast<double>(abstract[p]) / units[p];
        const double instability = ce / (ce + ca);
        total += std::abs(a + instability - 1.0);
        ++count;
    }
    return fold(total, count, agg);
}

long long forbidden_dependencies(const DependencyGraph& graph, const ArchitectureSolution& sol,
                                 const ConceptualModel& model) {
    long long count = 0;
    for (const Edge& e : graph.edges())
        if (!model.allowed(sol.layer_of_unit(e.from), sol.layer_of_unit(e.to))) ++count;
    return count;
}

std::vector<int> strongly_connected_components(const PackageGraph& pg) {
    // Iterative Tarjan.
    const std::size_t n = pg.node_count();
    std::vector<int> index(n, -1);
    std::vector<int> low(n, 0);
    std::vector<int> component(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::pair<int, std::size_t>> call;
    int next_index = 0;
    int next_component = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.emplace_back(static_cast<int>(root), 0);
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            const auto vi = static_cast<std::size_t>(v);
            if (edge == 0 && index[vi] < 0) {
                index[vi] = low[vi] = next_index++;
                stack.push_back(v);
                on_stack[vi] = 1;
            }
            if (edge < pg.out[vi].size()) {
                const int w = pg.out[vi][edge++];
                const auto wi = static_cast<std::size_t>(w);
                if (index[wi] < 0) {
                    call.emplace_back(w, 0);
                } else if (on_stack[wi]) {
                    low[vi] = std::min(low[vi], index[wi]);
                }
                continue;
            }
            if (low[vi] == index[vi]) {
                int w = -1;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = 0;
                    component[static_cast<std::size_t>(w)] = next_component;
                } while (w != v);
                ++next_component;
            }
            const int finished = v;
            call.pop_back();
            if (!call.empty()) {
                const auto parent = static_cast<std::size_t>(call.back().first);
                low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
            }
        }
    }
    return component;
}

long long package_cycles(const PackageGraph& pg) {
    // Edges within one SCC are exactly the edges on some cycle; self-loops do
    // not exist in a package graph, so any such edge implies SCC size >= 2.
    const std::vector<int> comp = strongly_connected_components(pg);
    long long count = 0;
    for (std::size_t i = 0; i < pg.node_count(); ++i)
        for (int j : pg.out[i])
            if (comp[i] == comp[static_cast<std::size_t>(j)]) ++count;
    return count;
}

long long size_range(const ArchitectureSolution& sol, std::size_t units) {
    const std::vector<int> sizes = package_sizes(sol, units);
    if (sizes.empty()) return 0;
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    return *hi - *lo;
}

ObjectiveVector evaluate(const DependencyGraph& graph, const ArchitectureSolution& sol,
                         const ConceptualModel& model, Aggregation agg) {
    const PackageGraph pg = package_graph(graph, sol);
    ObjectiveVector v{};
    v[0] = -relational_cohesion(graph, sol, agg);
    v[1] = std::abs(nccd(pg) - 1.0);
    v[2] = efferent_coupling(pg, agg);
    v[3] = afferent_coupling(pg, agg);
    v[4] = distance(graph, pg, sol, agg);
    v[5] = static_cast<double>(forbidden_dependencies(graph, sol, model));
    v[6] = static_cast<double>(package_cycles(pg));
    v[7] = static_cast<double>(size_range(sol, graph.unit_count()));
    return v;
}

std::vector<PackageMetrics> package_metrics(const DependencyGraph& graph, const ArchitectureSolution& sol) {
    const PackageGraph pg = package_graph(graph, sol);
    const std::vector<int> in = in_degrees(pg);
    std::vector<PackageMetrics> result(pg.node_count());
    std::vector<int> local(sol.package_slots(), -1);
    for (std::size_t i = 0; i < pg.node_count(); ++i) {
        local[static_cast<std::size_t>(pg.packages[i])] = static_cast<int>(i);
        result[i].package = pg.packages[i];
        result[i].layer = sol.package_to_layer[static_cast<std::size_t>(pg.packages[i])];
        result[i].efferent = static_cast<int>(pg.out[i].size());
        result[i].afferent = in[i];
    }
    for (std::size_t u = 0; u < sol.unit_to_package.size(); ++u) {
        auto& m = result[static_cast<std::size_t>(local[static_cast<std::size_t>(sol.unit_to_package[u])])];
        ++m.size;
        if (graph.nodes()[u].is_abstract) ++m.abstract_units;
    }
    for (const Edge& e : graph.edges()) {
        const int p = sol.unit_to_package[static_cast<std::size_t>(e.from)];
        if (p == sol.unit_to_package[static_cast<std::size_t>(e.to)])
            ++result[static_cast<std::size_t>(local[static_cast<std::size_t>(p)])].internal_edges;
    }
    for (auto& m : result) {
        m.cohesion = (m.internal_edges + 1.0) / m.size;
        if (m.efferent + m.afferent > 0) {
            const double instability = static_cast<double>(m.efferent) / (m.efferent + m.afferent);
            m.distance = std::abs(static_cast<double>(m.abstract_units) / m.size + instability - 1.0);
        }
    }
    return result;
}

std::vector<ForbiddenEdge> forbidden_edges(const DependencyGraph& graph, const ArchitectureSolution& sol,
                                           const ConceptualModel& model) {
    std::vector<ForbiddenEdge> result;
    for (const Edge& e : graph.edges()) {
        const int from = sol.layer_of_unit(e.from);
        const int to = sol.layer_of_unit(e.to);
        if (!model.allowed(from, to)) result.push_back({e.from, e.to, from, to});
    }
    return result;
}

std::vector<Edge> cyclic_package_edges(const PackageGraph& pg) {
    const std::vector<int> comp = strongly_connected_components(pg);
    std::vector<Edge> result;
    for (std::size_t i = 0; i < pg.node_count(); ++i)
        for (int j : pg.out[i])
            if (comp[i] == comp[static_cast<std::size_t>(j)])
                result.push_back({pg.packages[i], pg.packages[static_cast<std::size_t>(j)]});
    return result;
}

}  // namespace archrecon
