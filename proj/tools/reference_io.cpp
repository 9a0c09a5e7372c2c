#include "reference_io.hpp"

#include <fstream>

#include "divsamp/error.hpp"

namespace divsamp::cli {

ReferenceSummary reference_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kIo, "reference summary must be a JSON object");
  ReferenceSummary ref;
  try {
    ref.user_id = doc.at("user_id").get<std::string>();
    ref.frame_indices = doc.at("frame_indices").get<std::vector<StreamIndex>>();
    ref.frame_features = doc.at("features").get<std::vector<Vector>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed reference summary: ") + e.what());
  }
  try {
    ref.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kIo, e.what());
  }
  return ref;
}

nlohmann::json to_json(const ReferenceSummary& ref) {
  return {{"user_id", ref.user_id}, {"frame_indices", ref.frame_indices}, {"features", ref.frame_features}};
}

std::vector<ReferenceSummary> load_references(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, path + ": " + e.what());
  }
  std::vector<ReferenceSummary> refs;
  if (doc.is_array()) {
    for (const auto& item : doc) refs.push_back(reference_from_json(item));
  } else {
    refs.push_back(reference_from_json(doc));
  }
  return refs;
}

void save_references(const std::string& path, const std::vector<ReferenceSummary>& refs) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : refs) doc.push_back(to_json(r));
  out << doc.dump() << '\n';
}

}  // namespace divsamp::cli
