#include <doctest.h>

#include <random>

#include "archrecon/encoding.hpp"
#include "archrecon/errors.hpp"
#include "archrecon/harness.hpp"
#include "archrecon/pareto.hpp"
#include "archrecon/search.hpp"
#include "support.hpp"

using namespace archrecon;

namespace {

PointSet as_points(const std::vector<ObjectiveVector>& vs) {
    PointSet out;
    for (const auto& v : vs) out.emplace_back(v.begin(), v.end());
    return out;
}

Problem small_problem(std::vector<Pin> pins = {}) {
    SyntheticSystem sys = make_synthetic_system(40, 4, 3, 0.05, 2);
    return Problem(std::move(sys.graph), std::move(sys.model), pins);
}

RunConfig small_config(Algorithm a, long long evals = 600) {
    RunConfig c;
    c.algorithm = a;
    c.population = 20;
    c.max_evaluations = evals;
    c.snapshot_interval = 100;
    c.seed = 17;
    return c;
}

constexpr Algorithm kAll[] = {Algorithm::nsga2, Algorithm::omopso, Algorithm::gde3, Algorithm::random};

}  // namespace

TEST_CASE("decode floors genes") {
    const PinTable none(2, 2);
    const ArchitectureSolution s = decode(Genotype{{0.4, 0.9, 0.1, 0.6}}, none, {}, 2);
    CHECK(s.unit_to_package == std::vector<int>{0, 1});
    CHECK(s.package_to_layer == std::vector<int>{0, 1});

    const PinTable four(1, 4);
    CHECK(decode(Genotype{{1.0, 1.0, 0.0, 0.0, 0.0}}, four, {}, 2).unit_to_package[0] == 3);
    CHECK(decode(Genotype{{1.0, 1.0, 0.0, 0.0, 0.0}}, four, {}, 2).package_to_layer[0] == 1);
}

TEST_CASE("decode honours pins and freeze") {
    PinTable pins(2, 3);
    pins.unit_package[0] = 2;
    pins.unit_package_source[0] = 0;
    FreezeMask frozen{{std::nullopt, 1, std::nullopt}};
    const ArchitectureSolution s = decode(Genotype{{0.0, 0.0, 0.0, 0.0, 0.0}}, pins, frozen, 2);
    CHECK(s.unit_to_package[0] == 2);
    CHECK(s.unit_to_package[1] == 0);
    CHECK(s.package_to_layer == std::vector<int>{0, 1, 0});
}

TEST_CASE("encode inverts decode on free entries") {
    const ArchitectureSolution sol{{3, 0, 2, 1, 3}, {1, 0, 3, 2}};
    CHECK(decode(encode(sol, 4), PinTable(5, 4), {}, 4) == sol);
}

TEST_CASE("pins and freeze hold for random genotypes") {
    const Problem p = small_problem({{"sys.l0.*", std::nullopt, 2}, {"sys.*.T1", 3, std::nullopt}});
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> genes(p.genome_length());
        for (auto& g : genes) g = u(gen);
        const ArchitectureSolution s = p.decode(genes);
        REQUIRE(p.honors_fixed(s));
        for (std::size_t i = 0; i < p.units(); ++i)
            if (p.graph().node(static_cast<int>(i)).fq_name.rfind("sys.l0.", 0) == 0) CHECK(s.layer_of_unit(static_cast<int>(i)) == 2);
    }
}

TEST_CASE("SBX crossover") {
    Rng rng(3);
    const Genotype a{{0.1, 0.5, 0.9}};
    const Genotype b{{0.7, 0.2, 0.4}};
    const auto [c0, d0] = sbx_crossover(a, b, 0.0, 10.0, rng);
    CHECK(c0 == a);
    CHECK(d0 == b);
    const auto [c1, d1] = sbx_crossover(a, a, 1.0, 10.0, rng);
    CHECK(c1 == a);
    CHECK(d1 == a);
    CHECK_THROWS_AS(sbx_crossover(a, Genotype{{0.1}}, 1.0, 10.0, rng), ContractViolation);

    double sum = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        auto [x, y] = sbx_crossover(Genotype{{0.2}}, Genotype{{0.8}}, 1.0, 10.0, rng);
        for (double g : {x.genes[0], y.genes[0]}) {
            REQUIRE(g >= 0.0);
            REQUIRE(g <= 1.0);
        }
        sum += x.genes[0] + y.genes[0];
    }
    CHECK(sum / (2.0 * draws) == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("polynomial mutation") {
    Rng rng(4);
    const Genotype g{{0.0, 0.3, 1.0}};
    CHECK(polynomial_mutation(g, 0.0, 10.0, rng) == g);
    for (int i = 0; i < 2000; ++i) {
        const Genotype m = polynomial_mutation(g, 1.0, 10.0, rng);
        REQUIRE(m.genes[0] >= 0.0);
        REQUIRE(m.genes[2] <= 1.0);
        REQUIRE(m.genes[1] >= 0.0);
        REQUIRE(m.genes[1] <= 1.0);
    }
    double shift = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) shift += polynomial_mutation(Genotype{{0.5}}, 1.0, 10.0, rng).genes[0] - 0.5;
    CHECK(std::abs(shift / draws) < 0.01);
}

TEST_CASE("nondominated filter examples") {
    CHECK(testsupport::sorted(nondominated_filter({{1, 2}, {2, 1}, {2, 2}})) == PointSet{{1, 2}, {2, 1}});
    CHECK(nondominated_filter({{3, 3}, {3, 3}, {3, 3}}) == PointSet{{3, 3}});
    CHECK(nondominated_filter({}).empty());
    CHECK_THROWS_AS(nondominated_filter({{1, 2}, {1}}), ContractViolation);
}

TEST_CASE("nondominated filter equals brute force") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 10; ++trial) {
        // A coarse grid forces ties and duplicates.
        const PointSet pts = testsupport::random_points(gen, 300, 1 + trial % 8, trial % 2 ? 4 : 0);
        CHECK(testsupport::sorted(nondominated_filter(pts)) == testsupport::filter_brute(pts));
    }
}

TEST_CASE("archive insertion keeps a non-dominated set") {
    ParetoArchive<Point, int> archive;
    CHECK(archive.insert({2, 2}, 0));
    CHECK_FALSE(archive.insert({2, 2}, 1));
    CHECK(archive.insert({1, 3}, 2));
    CHECK(archive.insert({1, 1}, 3));
    CHECK(archive.size() == 1);
    CHECK(archive.entries()[0].payload == 3);
}

TEST_CASE("random search keeps every non-dominated sample") {
    const Problem p = small_problem();
    RunConfig c = small_config(Algorithm::random, 100);
    c.population = 50;
    c.snapshot_interval = 50;
    std::vector<ObjectiveVector> seen;
    RunHooks hooks;
    hooks.on_evaluation = [&](const ArchitectureSolution&, const ObjectiveVector& v) { seen.push_back(v); };
    const RunResult r = run(p, c, hooks);
    CHECK(r.snapshots.size() == 2);
    CHECK(seen.size() == 100);
    CHECK(testsupport::sorted(as_points(r.snapshots.back().archive)) == testsupport::filter_brute(as_points(seen)));
}

TEST_CASE("every algorithm spends the exact budget and keeps a sound archive") {
    const Problem p = small_problem({{"sys.l0.*", std::nullopt, 1}});
    for (Algorithm a : kAll) {
        CAPTURE(to_string(a));
        std::vector<ObjectiveVector> seen;
        bool pins_held = true;
        RunHooks hooks;
        hooks.on_evaluation = [&](const ArchitectureSolution& s, const ObjectiveVector& v) {
            seen.push_back(v);
            pins_held = pins_held && p.honors_fixed(s);
        };
        std::size_t checked = 0;
        hooks.on_snapshot = [&](const Snapshot& s) {
            CHECK(static_cast<long long>(seen.size()) == s.eval_count);
            const PointSet so_far = as_points(seen);
            for (const auto& m : s.archive) {
                const Point pm(m.begin(), m.end());
                for (const auto& q : so_far) REQUIRE_FALSE(testsupport::dominates_brute(q, pm));
            }
            ++checked;
        };
        const RunResult r = run(p, small_config(a, 700));
        const RunResult traced = run(p, small_config(a, 700), hooks);
        CHECK(seen.size() == 700);
        CHECK(traced.evaluations == 700);
        CHECK(checked == 7);
        CHECK(pins_held);
        CHECK(r.final_front == traced.final_front);
        for (std::size_t i = 0; i < r.snapshots.size(); ++i) CHECK(r.snapshots[i].eval_count == 100 * static_cast<long long>(i + 1));
        // Final front mirrors the last archive.
        std::vector<ObjectiveVector> front;
        for (const auto& m : r.final_front) {
            front.push_back(m.objectives);
            CHECK(p.evaluate(m.solution, Aggregation::mean) == m.objectives);
        }
        CHECK(front == r.snapshots.back().archive);
    }
}

TEST_CASE("identical seeds give identical results, different seeds differ") {
    const Problem p = small_problem();
    for (Algorithm a : kAll) {
        const RunResult x = run(p, small_config(a));
        const RunResult y = run(p, small_config(a));
        CHECK(x.snapshots == y.snapshots);
        CHECK(x.final_front == y.final_front);
        RunConfig other = small_config(a);
        other.seed = 18;
        CHECK_FALSE(run(p, other).snapshots == x.snapshots);
    }
}

TEST_CASE("nsga2 archive minima never get worse") {
    const Problem p = small_problem();
    const RunResult r = run(p, small_config(Algorithm::nsga2, 2000));
    ObjectiveVector best{};
    best.fill(std::numeric_limits<double>::infinity());
    for (const auto& s : r.snapshots) {
        for (std::size_t k = 0; k < kObjectiveCount; ++k) {
            double m = std::numeric_limits<double>::infinity();
            for (const auto& v : s.archive) m = std::min(m, v[k]);
            CHECK(m <= best[k]);
            best[k] = m;
        }
    }
}

TEST_CASE("run config validation") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.population == 50);
    CHECK(c.max_evaluations == 50000);
    CHECK(c.snapshot_interval == 50);
    CHECK(c.mutation_rate == 0.5);
    CHECK(c.mutation_di == 10.0);
    CHECK(c.crossover_rate == 1.0);
    CHECK(c.crossover_di == 10.0);
    c.snapshot_interval = 70;
    CHECK_THROWS_AS(c.validate(), ContractViolation);
    c = {};
    c.population = 0;
    CHECK_THROWS_AS(c.validate(), ContractViolation);
    CHECK_THROWS_AS(parse_algorithm("abyss"), ContractViolation);
    CHECK(parse_algorithm("omopso_style") == Algorithm::omopso);
    CHECK(parse_algorithm("gde3_style") == Algorithm::gde3);
}

TEST_CASE("non-dominated ranks and crowding") {
    const std::vector<ObjectiveVector> pts = {{1, 1, 0, 0, 0, 0, 0, 0}, {2, 2, 0, 0, 0, 0, 0, 0},
                                              {0, 3, 0, 0, 0, 0, 0, 0}, {3, 3, 0, 0, 0, 0, 0, 0}};
    CHECK(nondominated_ranks(pts) == std::vector<int>{0, 1, 0, 2});
    const auto cd = crowding_distances(pts, {0, 2});
    CHECK(std::isinf(cd[0]));
    CHECK(std::isinf(cd[1]));
}
