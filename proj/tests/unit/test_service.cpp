#include <doctest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "archrecon/errors.hpp"
#include "archrecon/service.hpp"
#include "support.hpp"

using namespace archrecon;
namespace fs = std::filesystem;

namespace {

Json tiny_request(std::uint64_t seed) {
    return {{"synthetic", {{"units", 30}, {"packages", 3}, {"layers", 3}, {"noise", 0.1}, {"seed", 1}}},
            {"system", "tiny"},
            {"config", {{"population", 10}, {"max_evaluations", 200}, {"snapshot_interval", 50}, {"seed", seed},
                        {"scenario", "strict4"}}}};
}

/// Server on an ephemeral port, stopped on scope exit.
struct LiveServer {
    Service service;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit LiveServer(const fs::path& root) : service(root) {
        service.mount(server);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LiveServer() {
        server.stop();
        thread.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

Json body_of(const httplib::Result& r) {
    REQUIRE(r);
    return Json::parse(r->body);
}

}  // namespace

TEST_CASE("filter query parsing and validation") {
    const FilterQuery q = filter_query_from_json(Json::parse(R"({"bounds": {"violations": [null, 10], "0": [-2, -1]}})"));
    CHECK(q.upper[5] == 10.0);
    CHECK_FALSE(q.lower[5].has_value());
    CHECK(q.lower[0] == -2.0);
    CHECK_THROWS_AS(filter_query_from_json(Json::parse(R"({"bounds": {"speed": [0, 1]}})")), ParseError);
    CHECK_THROWS_AS(filter_query_from_json(Json::parse(R"({"bounds": {"violations": [5, 1]}})")), ContractViolation);
}

TEST_CASE("filtering, details and constrained specs") {
    const fs::path root = testsupport::scratch_dir("service_core");
    ResultStore store(root);
    const RunSpec spec = spec_from_json(tiny_request(3), {});
    const std::string id = store.execute(spec).id;
    const auto front = store.load_front(id);
    REQUIRE_FALSE(front.empty());

    FilterQuery all;
    all.run = id;
    CHECK(filter_solutions(store, all).size() == front.size());

    FilterQuery none;
    none.run = id;
    none.upper[5] = -1.0;
    CHECK(filter_solutions(store, none).empty());

    // Random bounds against a hand-rolled enumeration; tightening never adds.
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 20; ++trial) {
        FilterQuery q;
        q.run = id;
        const std::size_t k = gen() % kObjectiveCount;
        std::vector<double> vals;
        for (const auto& m : front) vals.push_back(m.objectives[k]);
        std::sort(vals.begin(), vals.end());
        q.upper[k] = vals[gen() % vals.size()];
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < front.size(); ++i)
            if (front[i].objectives[k] <= *q.upper[k]) expected.push_back(i);
        std::vector<std::size_t> got;
        for (const auto& s : filter_solutions(store, q)) got.push_back(s.ref.index);
        CHECK(got == expected);
        FilterQuery tighter = q;
        tighter.upper[k] = *q.upper[k] - 1e-9;
        CHECK(filter_solutions(store, tighter).size() <= got.size());
    }

    FilterQuery unknown;
    unknown.run = "0000000000000000";
    CHECK_THROWS_AS(filter_solutions(store, unknown), NotFoundError);

    for (std::size_t i = 0; i < front.size(); ++i) {
        const SolutionDetail d = solution_detail(store, SolutionRef{id, i}.str());
        CHECK(static_cast<double>(d.violations.size()) == d.objectives[5]);
        CHECK(static_cast<double>(d.cyclic_edges.size()) == d.objectives[6]);
        CHECK(d.solution == front[i].solution);
        for (const auto& v : d.violations) {
            CHECK_FALSE(v.from_name.empty());
            CHECK(v.edge.from_layer == d.solution.layer_of_unit(v.edge.from));
        }
    }
    CHECK_THROWS_AS(solution_detail(store, id + ":100000"), NotFoundError);

    CHECK_THROWS_AS(constrained_spec(store, id, {}, nullptr), ContractViolation);
    const RunSpec pinned = constrained_spec(store, id, {{"sys.l0.p0", std::nullopt, 0}}, Json{{"seed", 9}});
    CHECK(pinned.pins.size() == 1);
    CHECK(pinned.config.seed == 9);
    CHECK_THROWS_AS(constrained_spec(store, id, {{"sys.l0.p0", std::nullopt, 0}, {"sys.l0.p0", std::nullopt, 1}}, nullptr),
                    PinConflictError);
}

TEST_CASE("planted solution detail has no violations") {
    const fs::path root = testsupport::scratch_dir("service_planted");
    ResultStore store(root);
    const SyntheticSystem sys = make_synthetic_system(30, 3, 3, 0.0, 2);
    RunSpec spec{sys.graph, sys.model, {}, {}, "planted"};
    spec.config.scenario = "strict4";
    spec.config.max_evaluations = 100;
    spec.config.population = 10;
    // Pin every unit and package to the planted truth: the front is that one solution.
    for (std::size_t u = 0; u < 30; ++u)
        spec.pins.push_back({sys.graph.node(static_cast<int>(u)).fq_name, sys.planted.unit_to_package[u], std::nullopt});
    for (std::size_t k = 0; k < 3; ++k)
        spec.pins.push_back({package_slot_name(sys.graph, static_cast<int>(k)), std::nullopt, sys.planted.package_to_layer[k]});
    const std::string id = store.execute(spec).id;
    REQUIRE(store.load_front(id).size() == 1);
    const SolutionDetail d = solution_detail(store, id + ":0");
    CHECK(d.violations.empty());
    CHECK(d.cyclic_edges.empty());
}

TEST_CASE("HTTP surface") {
    const fs::path root = testsupport::scratch_dir("service_http");
    LiveServer live(root);
    auto cli = live.client();

    auto posted = cli.Post("/runs", tiny_request(5).dump(), "application/json");
    REQUIRE(posted);
    CHECK(posted->status == 202);
    const std::string id = body_of(posted)["id"];
    live.service.wait_idle();

    const Json rec = body_of(cli.Get("/runs/" + id));
    CHECK(rec["status"] == "done");
    CHECK(rec["latest_eval"] == 200);
    CHECK(body_of(cli.Get("/runs"))["runs"].size() == 1);

    auto again = cli.Post("/runs", tiny_request(5).dump(), "application/json");
    REQUIRE(again);
    CHECK(again->status == 200);

    const Json snaps = body_of(cli.Get("/runs/" + id + "/snapshots?from=100"));
    REQUIRE(snaps["snapshots"].size() == 2);
    CHECK(snaps["snapshots"][0]["evals"] == 150);

    const Json front = body_of(cli.Get("/runs/" + id + "/front"));
    const auto& solutions = front["solutions"];
    REQUIRE_FALSE(solutions.empty());
    for (const auto& s : solutions) {
        auto detail = cli.Get("/solutions/" + s["ref"].get<std::string>());
        REQUIRE(detail);
        CHECK(detail->status == 200);
    }

    auto filtered = cli.Post("/runs/" + id + "/filter", R"({"bounds": {"violations": [null, -1]}})", "application/json");
    CHECK(body_of(filtered)["solutions"].empty());
    auto everything = cli.Post("/runs/" + id + "/filter", "{}", "application/json");
    CHECK(body_of(everything)["solutions"].size() == solutions.size());

    // Read endpoints are pure over an idle store.
    CHECK(cli.Get("/runs/" + id + "/front")->body == cli.Get("/runs/" + id + "/front")->body);

    auto conflict = cli.Post("/runs/" + id + "/constrain",
                             R"({"pins": [{"pattern": "sys.l0.p0", "layer": 0}, {"pattern": "sys.l0.p0", "layer": 1}]})",
                             "application/json");
    REQUIRE(conflict);
    CHECK(conflict->status == 409);
    CHECK(Json::parse(conflict->body)["pins"].size() == 2);
    CHECK(body_of(cli.Get("/runs"))["runs"].size() == 1);

    auto empty = cli.Post("/runs/" + id + "/constrain", "{}", "application/json");
    REQUIRE(empty);
    CHECK(empty->status == 400);

    auto constrained = cli.Post("/runs/" + id + "/constrain", R"({"pins": [{"pattern": "sys.l0.p0", "layer": 2}]})",
                                "application/json");
    REQUIRE(constrained);
    CHECK(constrained->status == 202);
    const std::string pinned_id = body_of(constrained)["id"];
    live.service.wait_idle();
    const Json pinned_front = body_of(cli.Get("/runs/" + pinned_id + "/front"));
    for (const auto& s : pinned_front["solutions"]) {
        const Json d = body_of(cli.Get("/solutions/" + s["ref"].get<std::string>()));
        CHECK(d["package_to_layer"][0] == 2);
    }

    const Json ref = body_of(cli.Get("/reference-front?runs=" + id + "," + pinned_id));
    CHECK(ref["runs"].size() == 2);
    for (const auto& s : ref["solutions"]) CHECK(cli.Get("/solutions/" + s["ref"].get<std::string>())->status == 200);

    CHECK(body_of(cli.Get("/indicators?runs=" + id + "," + pinned_id))["rows"].size() == 2);
    CHECK(body_of(cli.Get("/indicators?every=1&runs=" + id + "," + pinned_id))["rows"].size() == 8);

    CHECK(cli.Get("/runs/ffffffffffffffff")->status == 404);
    CHECK(cli.Get("/solutions/nope")->status == 404);
    CHECK(cli.Post("/runs", "{oops", "application/json")->status == 400);
    CHECK(cli.Get("/runs/" + id + "/snapshots?from=x")->status == 400);
}

TEST_CASE("service port comes from the environment") {
    ::unsetenv("ARCHRECON_PORT");
    CHECK(service_port() == 8080);
    ::setenv("ARCHRECON_PORT", "9123", 1);
    CHECK(service_port() == 9123);
    ::unsetenv("ARCHRECON_PORT");
}
