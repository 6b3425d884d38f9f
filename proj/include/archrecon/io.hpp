#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "archrecon/graph.hpp"
#include "archrecon/objectives.hpp"
#include "archrecon/search.hpp"

namespace archrecon {

using Json = nlohmann::ordered_json;

/// Graph and model documents in the same shape parse_graph / parse_model read.
Json graph_to_json(const DependencyGraph& graph);
Json model_to_json(const ConceptualModel& model, const std::vector<Pin>& pins);
Json pin_to_json(const Pin& pin);
Pin pin_from_json(const Json& j, const std::string& path);

Json config_to_json(const RunConfig& config);
/// Reads a config; absent keys keep the values already in `base`. Unknown
/// keys and wrongly typed values raise ParseError with the field path.
RunConfig config_from_json(const Json& j, RunConfig base = {});

Json objectives_to_json(const ObjectiveVector& v);
ObjectiveVector objectives_from_json(const Json& j, const std::string& path);

std::string read_file(const std::string& path);
/// Writes to a sibling temporary and renames, so readers see old or new content.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace archrecon
