// Structured values cross the boundary as JSON text; the Python package
// decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "archrecon/errors.hpp"
#include "archrecon/harness.hpp"
#include "archrecon/indicators.hpp"
#include "archrecon/io.hpp"
#include "archrecon/pareto.hpp"
#include "archrecon/search.hpp"
#include "archrecon/store.hpp"

namespace py = pybind11;
using namespace archrecon;

namespace {

Json parse_json(const std::string& text, const char* what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(what, e.what());
    }
}

std::vector<double> to_list(const ObjectiveVector& v) { return {v.begin(), v.end()}; }

Json front_json(const std::vector<FrontMember>& front) {
    Json arr = Json::array();
    for (const auto& m : front)
        arr.push_back({{"objectives", to_list(m.objectives)},
                       {"unit_to_package", m.solution.unit_to_package},
                       {"package_to_layer", m.solution.package_to_layer}});
    return arr;
}

std::string evaluate_solution(const std::string& graph, const std::string& model, const std::vector<int>& unit_to_package,
                              const std::vector<int>& package_to_layer, const std::string& aggregation) {
    const DependencyGraph g = parse_graph(graph);
    const ModelDocument doc = parse_model(model);
    const ArchitectureSolution sol{unit_to_package, package_to_layer};
    return Json(to_list(evaluate(g, sol, doc.model, parse_aggregation(aggregation)))).dump();
}

std::string synthetic(int units, int packages, int layers, double noise, std::uint64_t seed) {
    const SyntheticSystem s = make_synthetic_system(units, packages, layers, noise, seed);
    return Json{{"graph", graph_to_json(s.graph)},
                {"model", model_to_json(s.model, {})},
                {"planted", {{"unit_to_package", s.planted.unit_to_package},
                             {"package_to_layer", s.planted.package_to_layer}}}}
        .dump();
}

std::string run_request(const std::string& request, const std::string& base_dir) {
    const RunSpec spec = spec_from_json(parse_json(request, "request"), base_dir);
    RunResult result;
    {
        py::gil_scoped_release release;
        result = run(problem_for(spec), spec.config);
    }
    Json snaps = Json::array();
    for (const auto& s : result.snapshots) snaps.push_back({{"evals", s.eval_count}, {"archive_size", s.archive.size()}});
    return Json{{"run_id", run_id(spec)},
                {"evaluations", result.evaluations},
                {"config", config_to_json(result.config)},
                {"front", front_json(result.final_front)},
                {"snapshots", snaps}}
        .dump();
}

std::string run_stored(const std::string& request, const std::string& base_dir, const std::string& store_root) {
    const RunSpec spec = spec_from_json(parse_json(request, "request"), base_dir);
    ResultStore store(store_root);
    py::gil_scoped_release release;
    return store.execute(spec).id;
}

std::string indicators(const PointSet& front, const std::vector<PointSet>& reference_inputs, std::size_t input) {
    const ReferenceFront ref = build_reference_front(reference_inputs);
    const IndicatorValues v = compute_indicators(front, ref, input);
    return Json{{"hv", v.hv}, {"gd", v.gd}, {"igd", v.igd}, {"eps", v.eps}, {"spacing", v.spacing},
                {"contribution", v.contribution}}
        .dump();
}

}  // namespace

PYBIND11_MODULE(_archrecon, m) {
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<PinConflictError>(m, "PinConflictError", PyExc_ValueError);
    py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_LookupError);

    m.attr("OBJECTIVES") = [] {
        py::list names;
        for (auto n : kObjectiveNames) names.append(std::string(n));
        return names;
    }();

    m.def("evaluate", &evaluate_solution, py::arg("graph"), py::arg("model"), py::arg("unit_to_package"),
          py::arg("package_to_layer"), py::arg("aggregation") = "mean");
    m.def("synthetic_system", &synthetic, py::arg("units"), py::arg("packages"), py::arg("layers"),
          py::arg("noise"), py::arg("seed"));
    m.def("run", &run_request, py::arg("request"), py::arg("base_dir") = "");
    m.def("run_stored", &run_stored, py::arg("request"), py::arg("base_dir"), py::arg("store"));
    m.def("nondominated_filter", &nondominated_filter, py::arg("points"));
    m.def("hypervolume", &hypervolume, py::arg("front"), py::arg("ref_point"));
    m.def("generational_distance", &generational_distance, py::arg("front"), py::arg("ref"));
    m.def("inverted_generational_distance", &inverted_generational_distance, py::arg("front"), py::arg("ref"));
    m.def("additive_epsilon", &additive_epsilon, py::arg("front"), py::arg("ref"));
    m.def("spacing", &spacing, py::arg("front"));
    m.def("indicators", &indicators, py::arg("front"), py::arg("reference_inputs"), py::arg("input"));
    m.def(
        "kruskal_wallis",
        [](const std::vector<std::vector<double>>& groups) {
            const KruskalWallis kw = kruskal_wallis(groups);
            return py::make_tuple(kw.h, kw.p);
        },
        py::arg("groups"));
}
