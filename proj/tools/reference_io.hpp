#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "divsamp/eval.hpp"

namespace divsamp::cli {

// {"user_id": "...", "frame_indices": [...], "features": [[...], ...]}
ReferenceSummary reference_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ReferenceSummary& ref);

// A file holds one reference object or an array of them.
std::vector<ReferenceSummary> load_references(const std::string& path);
void save_references(const std::string& path, const std::vector<ReferenceSummary>& refs);

}  // namespace divsamp::cli
