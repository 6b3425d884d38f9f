#include "archrecon/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "archrecon/errors.hpp"
#include "archrecon/random.hpp"

namespace archrecon {

std::string_view to_string(ScenarioId id) noexcept {
    switch (id) {
        case ScenarioId::transient4: return "transient4";
        case ScenarioId::strict4: return "strict4";
        case ScenarioId::strict4_mounted: return "strict4_mounted";
    }
    return "unknown";
}

ScenarioId parse_scenario(std::string_view token) {
    if (token == "transient4") return ScenarioId::transient4;
    if (token == "strict4") return ScenarioId::strict4;
    if (token == "strict4_mounted") return ScenarioId::strict4_mounted;
    throw ContractViolation("unknown scenario '" + std::string(token) + "'");
}

Scenario scenario(ScenarioId id) {
    switch (id) {
        case ScenarioId::transient4: return {id, 4, LayerStyle::transient, false, false};
        case ScenarioId::strict4: return {id, 4, LayerStyle::strict, false, false};
        case ScenarioId::strict4_mounted: return {id, 4, LayerStyle::strict, true, true};
    }
    throw ContractViolation("unknown scenario");
}

ConceptualModel scenario_model(const ConceptualModel& base, const Scenario& s) {
    std::vector<std::string> names = base.layer_names();
    if (static_cast<int>(names.size()) != s.layer_count) {
        names.clear();
        for (int i = 0; i < s.layer_count; ++i) names.push_back("layer" + std::to_string(i));
    }
    return ConceptualModel(s.style, std::move(names), base.package_slots());
}

FreezeMask mounted_layers(std::size_t packages, int layers, std::uint64_t seed, const PinTable& pins) {
    Rng rng = Rng::derive(seed, 0x6d6f756e74ULL);
    FreezeMask mask;
    mask.package_layer.resize(packages);
    for (std::size_t k = 0; k < packages; ++k) {
        const int layer = rng.index(static_cast<std::size_t>(layers));
        if (k < pins.package_layer.size() && pins.package_layer[k]) continue;
        mask.package_layer[k] = layer;
    }
    return mask;
}

Genotype origin_genotype(const DependencyGraph& graph, std::size_t packages, int layers,
                         const std::vector<std::optional<int>>& package_layers) {
    Genotype g;
    g.genes.reserve(graph.unit_count() + packages);
    const auto slots = static_cast<double>(packages);
    for (std::size_t u = 0; u < graph.unit_count(); ++u) {
        const int slot = std::min(graph.origin_slot(static_cast<int>(u)), static_cast<int>(packages) - 1);
        g.genes.push_back((slot + 0.5) / slots);
    }
    for (std::size_t k = 0; k < packages; ++k) {
        const int layer = k < package_layers.size() && package_layers[k] ? *package_layers[k] : 0;
        g.genes.push_back((layer + 0.5) / layers);
    }
    return g;
}

Problem make_problem(const DependencyGraph& graph, const ConceptualModel& base, const std::vector<Pin>& pins,
                     ScenarioId id, std::uint64_t seed) {
    const Scenario s = scenario(id);
    ConceptualModel model = scenario_model(base, s);
    const int slots = resolve_package_slots(graph, model);
    PinTable table = bind_pins(pins, graph, model, slots);
    FreezeMask frozen;
    if (s.mounted) frozen = mounted_layers(static_cast<std::size_t>(slots), model.layer_count(), seed, table);
    Problem problem(graph, model, table, frozen);
    if (s.seed_from_origin)
        problem.set_initial_genotype(origin_genotype(graph, problem.packages(), model.layer_count(),
                                                     problem.fixed().package_layer));
    return problem;
}

SyntheticSystem make_synthetic_system(int units, int packages, int layers, double noise, std::uint64_t seed) {
    if (layers < 2 || packages < layers || units < packages)
        throw ContractViolation("synthetic system needs units >= packages >= layers >= 2");
    if (!(noise >= 0.0 && noise <= 1.0)) throw ContractViolation("noise must lie in [0, 1]");
    Rng rng(seed);
    const auto U = static_cast<std::size_t>(units);
    const auto P = static_cast<std::size_t>(packages);

    ArchitectureSolution planted;
    planted.package_to_layer.resize(P);
    for (std::size_t k = 0; k < P; ++k)
        planted.package_to_layer[k] = static_cast<int>(k * static_cast<std::size_t>(layers) / P);

    std::vector<int> order(U);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = U; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(rng.index(i))]);
    planted.unit_to_package.assign(U, 0);
    for (std::size_t i = 0; i < U; ++i) planted.unit_to_package[static_cast<std::size_t>(order[i])] = static_cast<int>(i % P);

    std::vector<std::vector<int>> members(P);
    for (std::size_t u = 0; u < U; ++u) members[static_cast<std::size_t>(planted.unit_to_package[u])].push_back(static_cast<int>(u));
    std::vector<std::vector<int>> layer_packages(static_cast<std::size_t>(layers));
    for (std::size_t k = 0; k < P; ++k)
        layer_packages[static_cast<std::size_t>(planted.package_to_layer[k])].push_back(static_cast<int>(k));

    auto package_name = [&](std::size_t k) {
        return "sys.l" + std::to_string(planted.package_to_layer[k]) + ".p" + std::to_string(k);
    };
    // Origin packages model an eroded code base: a fixed share of units sits in
    // a random package. Drawn from a separate stream so edges do not depend on it.
    Rng drift = Rng::derive(seed, 0x6f726967696eULL);
    std::vector<TypeNode> nodes(U);
    for (std::size_t u = 0; u < U; ++u) {
        const auto k = static_cast<std::size_t>(planted.unit_to_package[u]);
        const auto origin = drift.chance(kOriginDrift) ? static_cast<std::size_t>(drift.index(P)) : k;
        nodes[u] = {static_cast<int>(u), package_name(k) + ".T" + std::to_string(u), package_name(origin), rng.chance(0.2)};
    }

    std::set<Edge> edges;
    constexpr int kIntraDegree = 2;
    for (std::size_t u = 0; u < U; ++u) {
        const auto& own = members[static_cast<std::size_t>(planted.unit_to_package[u])];
        // Intra-package edges point forward in member order, so each package is a DAG.
        const auto pos = static_cast<std::size_t>(std::find(own.begin(), own.end(), static_cast<int>(u)) - own.begin());
        if (pos + 1 < own.size()) {
            for (int d = 0; d < kIntraDegree; ++d) {
                const std::size_t target = pos + 1 + static_cast<std::size_t>(rng.index(own.size() - pos - 1));
                edges.insert({static_cast<int>(u), own[target]});
            }
        }
        const int layer = planted.layer_of_unit(static_cast<int>(u));
        if (layer + 1 < layers) {
            const auto& below = layer_packages[static_cast<std::size_t>(layer + 1)];
            const auto& target = members[static_cast<std::size_t>(below[static_cast<std::size_t>(rng.index(below.size()))])];
            edges.insert({static_cast<int>(u), target[static_cast<std::size_t>(rng.index(target.size()))]});
        }
    }

    const auto wanted = static_cast<std::size_t>(std::llround(noise * static_cast<double>(edges.size())));
    const std::size_t capacity = U * (U - 1);
    std::vector<Edge> noise_edges;
    while (noise_edges.size() < wanted && edges.size() < capacity) {
        const Edge e{rng.index(U), rng.index(U)};
        if (e.from == e.to || edges.contains(e)) continue;
        edges.insert(e);
        noise_edges.push_back(e);
    }

    std::vector<std::string> layer_names;
    for (int i = 0; i < layers; ++i) layer_names.push_back("layer" + std::to_string(i));
    return {DependencyGraph(std::move(nodes), std::vector<Edge>(edges.begin(), edges.end())),
            ConceptualModel(LayerStyle::strict, std::move(layer_names)), std::move(planted), std::move(noise_edges)};
}

double median(std::vector<double> values) {
    if (values.empty()) throw ContractViolation("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Summary summarize(std::vector<double> values) {
    if (values.empty()) throw ContractViolation("summary of an empty sample");
    Summary s;
    s.n = values.size();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.median = median(std::move(values));
    return s;
}

KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ContractViolation("Kruskal-Wallis needs at least two groups");
    struct Obs {
        double value;
        std::size_t group;
    };
    std::vector<Obs> all;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) throw ContractViolation("Kruskal-Wallis group " + std::to_string(g) + " is empty");
        for (double v : groups[g]) all.push_back({v, g});
    }
    std::sort(all.begin(), all.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });

    const auto n = static_cast<double>(all.size());
    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) rank_sum[all[k].group] += avg_rank;
        i = j;
    }
    const double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction <= 0.0) return {0.0, 1.0};

    double h = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) h += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
    h = (12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0)) / correction;
    h = std::max(h, 0.0);
    const double df = static_cast<double>(groups.size() - 1);
    return {h, boost::math::gamma_q(df / 2.0, h / 2.0)};
}

}  // namespace archrecon
