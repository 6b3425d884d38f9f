#include <doctest.h>

#include <random>

#include "archrecon/errors.hpp"
#include "archrecon/indicators.hpp"
#include "support.hpp"

using namespace archrecon;
using namespace testsupport;

TEST_CASE("reference front keeps the union's non-dominated points") {
    const ReferenceFront a = build_reference_front({{{0, 1}}, {{1, 0}}});
    CHECK(sorted(a.points) == PointSet{{0, 1}, {1, 0}});
    CHECK(a.inputs == 2);

    const ReferenceFront b = build_reference_front({{{0, 0}}, {{1, 1}}});
    CHECK(b.points == PointSet{{0, 0}});
    CHECK(b.provenance == std::vector<std::size_t>{0});

    // Shared point goes to the lowest input.
    const ReferenceFront c = build_reference_front({{{1, 0}}, {{0, 1}, {1, 0}}});
    REQUIRE(c.points.size() == 2);
    for (std::size_t i = 0; i < c.points.size(); ++i)
        CHECK(c.provenance[i] == (c.points[i] == Point{1, 0} ? 0u : 1u));

    CHECK_THROWS_AS(build_reference_front({{{0, 1}}, {{1, 0, 0}}}), ContractViolation);
}

TEST_CASE("reference front equals brute-force filter of the concatenation") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<PointSet> fronts;
        PointSet all;
        for (int f = 0; f < 10; ++f) {
            fronts.push_back(nondominated_filter(random_points(gen, 30, 3, trial % 2 ? 5 : 0)));
            all.insert(all.end(), fronts.back().begin(), fronts.back().end());
        }
        const ReferenceFront ref = build_reference_front(fronts);
        CHECK(sorted(ref.points) == filter_brute(all));
        for (std::size_t i = 0; i < ref.points.size(); ++i) {
            const auto& src = fronts[ref.provenance[i]];
            CHECK(std::find(src.begin(), src.end(), ref.points[i]) != src.end());
            for (std::size_t f = 0; f < ref.provenance[i]; ++f)
                CHECK(std::find(fronts[f].begin(), fronts[f].end(), ref.points[i]) == fronts[f].end());
        }
    }
}

TEST_CASE("normalize examples") {
    const Normalizer n = Normalizer::from({{0, 10}, {2, 20}});
    CHECK(n.apply({1, 15}) == Point{0.5, 0.5});
    CHECK(n.apply({0, 10}) == Point{0, 0});
    CHECK(n.apply({5, -3}) == Point{1, 0});
    const Normalizer flat = Normalizer::from({{3, 0}, {3, 1}});
    CHECK(flat.apply({3, 0.5})[0] == 0.0);
    CHECK(normalize({{1, 15}}, n) == PointSet{{0.5, 0.5}});
}

TEST_CASE("hypervolume examples") {
    CHECK(hypervolume({{0.5, 0.5}}, {1, 1}) == doctest::Approx(0.25));
    CHECK(hypervolume({{0, 0.5}, {0.5, 0}}, {1, 1}) == doctest::Approx(0.75));
    CHECK(hypervolume({{1, 1}}, {1, 1}) == 0.0);
    CHECK(hypervolume({{0.2, 1}, {1, 0.3}}, {1, 1}) == 0.0);
    CHECK(hypervolume({}, {1, 1}) == 0.0);
    try {
        hypervolume({{0.5, 0.5}, {0.2, 1.5}}, {1, 1});
        FAIL("expected ContractViolation");
    } catch (const ContractViolation& e) {
        CHECK(std::string(e.what()).find("1.5") != std::string::npos);
    }
}

TEST_CASE("exact hypervolume equals inclusion-exclusion") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const PointSet f = random_points(gen, 1 + trial % 10, d, trial % 3 == 0 ? 4 : 0);
        const Point ref(d, 1.1);
        CHECK(hypervolume_exact(f, ref) == doctest::Approx(hv_inclusion_exclusion(f, ref)).epsilon(1e-12));
    }
}

TEST_CASE("Monte-Carlo hypervolume tracks the exact value") {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 4; ++trial) {
        const PointSet f = random_front(gen, 25, 3);
        const Point ref(3, 1.1);
        CHECK(std::abs(hypervolume_monte_carlo(f, ref, 200'000) - hypervolume_exact(f, ref)) < 0.01);
    }
    const PointSet f8 = random_front(gen, 10, 8);
    const Point ref8(8, 1.1);
    CHECK(hypervolume(f8, ref8) == hypervolume_monte_carlo(f8, ref8));
    CHECK(hypervolume_monte_carlo(f8, ref8, 1000) == hypervolume_monte_carlo(f8, ref8, 1000));
}

TEST_CASE("hypervolume never drops when a point is added") {
    std::mt19937_64 gen(51);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 2 + trial % 3;
        PointSet f = random_front(gen, 8, d);
        const Point ref(d, 1.1);
        const double before = hypervolume(f, ref);
        f.push_back(random_points(gen, 1, d)[0]);
        CHECK(hypervolume(f, ref) >= before - 1e-12);
    }
}

TEST_CASE("distance indicator examples") {
    CHECK(generational_distance({{0.1, 1}}, {{0, 1}}) == doctest::Approx(0.1));
    CHECK(generational_distance({{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}) == 0.0);
    CHECK(inverted_generational_distance({{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}) == 0.0);
    CHECK(additive_epsilon({{0.2, 0.2}}, {{0.1, 0.1}}) == doctest::Approx(0.1));
    CHECK(additive_epsilon({{0, 1}}, {{0, 1}}) == 0.0);
    CHECK_THROWS_AS(generational_distance({}, {{0, 1}}), ContractViolation);
    CHECK_THROWS_AS(inverted_generational_distance({{0, 1}}, {}), ContractViolation);
    CHECK_THROWS_AS(additive_epsilon({}, {{0, 1}}), ContractViolation);
}

TEST_CASE("spacing examples") {
    CHECK(spacing({{0.3, 0.3}}) == 0.0);
    CHECK(spacing({{0, 1}, {1, 0}}) == 0.0);
    CHECK(spacing({{0, 0}, {0, 1}, {0, 3}}) == doctest::Approx(std::sqrt(1.0 / 3.0)));
    CHECK(spacing({{0, 0}, {0, 1}, {0, 3}}) == doctest::Approx(0.5774).epsilon(1e-4));
}

TEST_CASE("indicators match brute force") {
    std::mt19937_64 gen(61);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 2 + trial % 7;
        const PointSet f = random_points(gen, 1 + gen() % 30, d);
        const PointSet r = random_points(gen, 1 + gen() % 50, d);
        CHECK(generational_distance(f, r) == doctest::Approx(gd_brute(f, r)).epsilon(1e-12));
        CHECK(inverted_generational_distance(f, r) == doctest::Approx(gd_brute(r, f)).epsilon(1e-12));
        CHECK(additive_epsilon(f, r) == doctest::Approx(eps_brute(f, r)).epsilon(1e-12));
        CHECK(spacing(f) == doctest::Approx(spacing_brute(f)).epsilon(1e-12));
    }
}

TEST_CASE("contribution examples") {
    const ReferenceFront solo = build_reference_front({{{0, 1}, {1, 0}}});
    CHECK(contribution({{0, 1}, {1, 0}}, solo, 0) == 1.0);

    const ReferenceFront beaten = build_reference_front({{{0, 0}}, {{1, 1}}});
    CHECK(contribution({{1, 1}}, beaten, 1) == 0.0);

    const PointSet a = {{0, 3}, {1, 2}, {2, 1}};
    const PointSet b = {{3, 0}, {2, 2}};
    const ReferenceFront split = build_reference_front({a, b});
    CHECK(contribution(a, split, 0) == 0.75);
    CHECK(contribution(b, split, 1) == 0.25);
    CHECK_THROWS_AS(contribution(a, split, 2), ContractViolation);
}

TEST_CASE("contributions partition the reference front") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<PointSet> fronts;
        for (int f = 0; f < 5; ++f) fronts.push_back(nondominated_filter(random_points(gen, 20, 2, 6)));
        const ReferenceFront ref = build_reference_front(fronts);
        double total = 0;
        for (std::size_t f = 0; f < fronts.size(); ++f) total += contribution(fronts[f], ref, f);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("indicators are scale-free after normalization") {
    std::mt19937_64 gen(81);
    std::vector<PointSet> fronts;
    for (int f = 0; f < 3; ++f) fronts.push_back(nondominated_filter(random_points(gen, 15, 3)));
    std::vector<PointSet> scaled = fronts;
    for (auto& f : scaled)
        for (auto& p : f) {
            p[0] *= 1000.0;
            p[2] *= 0.01;
        }
    const ReferenceFront ref = build_reference_front(fronts);
    const ReferenceFront sref = build_reference_front(scaled);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        const IndicatorValues a = compute_indicators(fronts[f], ref, f);
        const IndicatorValues b = compute_indicators(scaled[f], sref, f);
        CHECK(a.hv == doctest::Approx(b.hv).epsilon(1e-9));
        CHECK(a.gd == doctest::Approx(b.gd).epsilon(1e-9));
        CHECK(a.igd == doctest::Approx(b.igd).epsilon(1e-9));
        CHECK(a.eps == doctest::Approx(b.eps).epsilon(1e-9));
        CHECK(a.spacing == doctest::Approx(b.spacing).epsilon(1e-9));
        CHECK(a.contribution == b.contribution);
    }
}

TEST_CASE("a pointwise dominating front scores no worse") {
    std::mt19937_64 gen(91);
    for (int trial = 0; trial < 20; ++trial) {
        const PointSet b = random_front(gen, 10, 3);
        PointSet a = b;
        for (auto& p : a)
            for (auto& x : p) x *= 0.9;
        const PointSet r = random_front(gen, 20, 3);
        const Point ref(3, 1.1);
        CHECK(additive_epsilon(a, r) <= additive_epsilon(b, r) + 1e-12);
        CHECK(hypervolume(a, ref) >= hypervolume(b, ref) - 1e-12);
    }
}

TEST_CASE("compute_indicators on an empty front") {
    const ReferenceFront ref = build_reference_front({{{0, 1}, {1, 0}}, {}});
    const IndicatorValues v = compute_indicators({}, ref, 1);
    CHECK(v.hv == 0.0);
    CHECK(v.contribution == 0.0);
    CHECK(std::isnan(v.gd));
}
