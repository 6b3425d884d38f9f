#include <doctest.h>

#include <random>
#include <set>

#include "archrecon/errors.hpp"
#include "archrecon/harness.hpp"
#include "archrecon/objectives.hpp"

using namespace archrecon;

namespace {

constexpr auto kViolations = static_cast<std::size_t>(Objective::violations);
constexpr auto kCycles = static_cast<std::size_t>(Objective::cyclic_edges);

}  // namespace

TEST_CASE("scenarios") {
    const Scenario t = scenario(parse_scenario("transient4"));
    CHECK(t.layer_count == 4);
    CHECK(t.style == LayerStyle::transient);
    CHECK_FALSE(t.mounted);
    const Scenario m = scenario(parse_scenario("strict4_mounted"));
    CHECK(m.style == LayerStyle::strict);
    CHECK(m.mounted);
    CHECK(m.seed_from_origin);
    CHECK_THROWS_AS(parse_scenario("strict5"), ContractViolation);

    const ConceptualModel base(LayerStyle::transient, {"ui", "app", "domain", "infra"}, 9);
    const ConceptualModel strict = scenario_model(base, scenario(ScenarioId::strict4));
    CHECK(strict.style() == LayerStyle::strict);
    CHECK(strict.layer_names() == base.layer_names());
    CHECK(strict.package_slots() == 9);
    CHECK(scenario_model(ConceptualModel(LayerStyle::strict, {"a", "b"}), t).layer_count() == 4);
}

TEST_CASE("planted system without noise is clean") {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        const SyntheticSystem sys = make_synthetic_system(120, 12, 4, 0.0, seed);
        CHECK(sys.graph.unit_count() == 120);
        CHECK(sys.model.style() == LayerStyle::strict);
        CHECK(sys.model.layer_count() == 4);
        CHECK(sys.noise_edges.empty());
        const ObjectiveVector v = evaluate(sys.graph, sys.planted, sys.model);
        CHECK(v[kViolations] == 0);
        CHECK(v[kCycles] == 0);
        CHECK(forbidden_dependencies(sys.graph, sys.planted, sys.model) == 0);
        CHECK(evaluate(sys.graph, sys.planted, sys.model.with_style(LayerStyle::transient))[kViolations] == 0);
        // Every layer is used.
        CHECK(std::set<int>(sys.planted.package_to_layer.begin(), sys.planted.package_to_layer.end()).size() == 4);
    }
}

TEST_CASE("planted violations equal a recount of forbidden noise edges") {
    const SyntheticSystem sys = make_synthetic_system(120, 12, 4, 0.2, 7);
    REQUIRE_FALSE(sys.noise_edges.empty());
    std::set<std::pair<int, int>> breaking;
    for (const auto& e : sys.noise_edges) {
        const int from = sys.planted.package_to_layer[static_cast<std::size_t>(sys.planted.unit_to_package[static_cast<std::size_t>(e.from)])];
        const int to = sys.planted.package_to_layer[static_cast<std::size_t>(sys.planted.unit_to_package[static_cast<std::size_t>(e.to)])];
        const bool ok = from == to || to == from + 1;
        if (!ok) breaking.insert({e.from, e.to});
    }
    CHECK(forbidden_dependencies(sys.graph, sys.planted, sys.model) == static_cast<long long>(breaking.size()));
    // round(0.2 * base edges) noise edges were drawn.
    const SyntheticSystem clean = make_synthetic_system(120, 12, 4, 0.0, 7);
    CHECK(sys.noise_edges.size() == static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(clean.graph.edges().size()))));
    CHECK(sys.graph.edges().size() == clean.graph.edges().size() + sys.noise_edges.size());
}

TEST_CASE("synthetic generator is deterministic and validates input") {
    const SyntheticSystem a = make_synthetic_system(50, 5, 3, 0.1, 3);
    const SyntheticSystem b = make_synthetic_system(50, 5, 3, 0.1, 3);
    CHECK(a.graph.edges() == b.graph.edges());
    CHECK(a.planted == b.planted);
    CHECK_THROWS_AS(make_synthetic_system(4, 5, 3, 0.0, 0), ContractViolation);
    CHECK_THROWS_AS(make_synthetic_system(10, 5, 1, 0.0, 0), ContractViolation);
    CHECK_THROWS_AS(make_synthetic_system(10, 5, 3, 1.5, 0), ContractViolation);
}

TEST_CASE("mounted layers are per seed and leave pinned packages alone") {
    PinTable pins(10, 6);
    pins.package_layer[2] = 3;
    pins.package_layer_source[2] = 0;
    const FreezeMask a = mounted_layers(6, 4, 5, pins);
    const FreezeMask b = mounted_layers(6, 4, 5, pins);
    CHECK(a.package_layer == b.package_layer);
    CHECK_FALSE(a.package_layer[2].has_value());
    for (std::size_t k = 0; k < 6; ++k)
        if (k != 2) {
            REQUIRE(a.package_layer[k].has_value());
            CHECK(*a.package_layer[k] >= 0);
            CHECK(*a.package_layer[k] < 4);
        }
    bool differs = false;
    for (std::uint64_t s = 6; s < 20 && !differs; ++s) differs = mounted_layers(6, 4, s, pins).package_layer != a.package_layer;
    CHECK(differs);
}

TEST_CASE("mounted problem starts from the origin mapping") {
    const SyntheticSystem sys = make_synthetic_system(60, 6, 4, 0.05, 1);
    const Problem p = make_problem(sys.graph, sys.model, {}, ScenarioId::strict4_mounted, 3);
    REQUIRE(p.initial_genotype().has_value());
    CHECK_FALSE(p.frozen().empty());
    const ArchitectureSolution start = p.decode(p.initial_genotype()->genes);
    for (std::size_t u = 0; u < 60; ++u) CHECK(start.unit_to_package[u] == sys.graph.origin_slot(static_cast<int>(u)));
    for (std::size_t k = 0; k < 6; ++k) CHECK(start.package_to_layer[k] == *p.frozen().package_layer[k]);

    const Problem plain = make_problem(sys.graph, sys.model, {}, ScenarioId::strict4, 3);
    CHECK_FALSE(plain.initial_genotype().has_value());
    CHECK(plain.frozen().empty());
    CHECK(plain.model().style() == LayerStyle::strict);
}

TEST_CASE("summaries") {
    const Summary s = summarize({1, 3, 2});
    CHECK(s.min == 1);
    CHECK(s.max == 3);
    CHECK(s.median == 2);
    CHECK(s.n == 3);
    const Summary one = summarize({4});
    CHECK((one.min == 4 && one.max == 4 && one.median == 4));
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK_THROWS_AS(summarize({}), ContractViolation);
}

TEST_CASE("Kruskal-Wallis examples") {
    const KruskalWallis same = kruskal_wallis({{1, 2, 3}, {1, 2, 3}});
    CHECK(same.h == doctest::Approx(0.0));
    CHECK(same.p == doctest::Approx(1.0));

    // Ranks 1..6, R1 = 6, R2 = 15: H = 12/42 * (36/3 + 225/3) - 21 = 27/7.
    const KruskalWallis split = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
    CHECK(split.h == doctest::Approx(27.0 / 7.0).epsilon(1e-12));
    CHECK(split.p == doctest::Approx(std::erfc(std::sqrt(27.0 / 14.0))).epsilon(1e-12));
    CHECK(split.p == doctest::Approx(0.0495).epsilon(1e-2));

    const KruskalWallis flat = kruskal_wallis({{5, 5}, {5, 5, 5}});
    CHECK(flat.h == 0.0);
    CHECK(flat.p == 1.0);

    CHECK_THROWS_AS(kruskal_wallis({{1, 2}}), ContractViolation);
    CHECK_THROWS_AS(kruskal_wallis({{1, 2}, {}}), ContractViolation);
}

TEST_CASE("Kruskal-Wallis tie correction") {
    // Ranks: 1 -> 1.5 (x2), 2 -> 3, 3 -> 4.5 (x2); R1 = 6, R2 = 10.5 / hand-computed.
    const std::vector<std::vector<double>> groups = {{1, 1, 2}, {3, 3}};
    const double n = 5;
    const double r1 = 1.5 + 1.5 + 3, r2 = 4.5 + 4.5;
    const double h_raw = 12.0 / (n * (n + 1)) * (r1 * r1 / 3 + r2 * r2 / 2) - 3 * (n + 1);
    const double ties = 1.0 - (2 * (8 - 2)) / (n * n * n - n);
    CHECK(kruskal_wallis(groups).h == doctest::Approx(h_raw / ties).epsilon(1e-12));
}

TEST_CASE("Kruskal-Wallis rejects about five percent under the null") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int rejections = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        std::vector<std::vector<double>> g(3, std::vector<double>(10));
        for (auto& s : g)
            for (auto& x : s) x = u(gen);
        rejections += kruskal_wallis(g).p < 0.05;
    }
    CHECK(rejections / static_cast<double>(trials) == doctest::Approx(0.05).epsilon(0.6));
}
