#pragma once

#include <string>

#include <json.hpp>

#include "hyperstar/hypertree.hpp"

namespace hyperstar {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Interchange form: {"arms": [[v11, v12, ...], [v21, ...], ...]}.
// Extra top-level keys (e.g. "meta") are ignored on input.
inline nlohmann::json pattern_to_json(const InfectionPattern& pattern) {
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& arm : pattern.arms()) arms.push_back(arm.overlaps);
  return nlohmann::json{{"arms", arms}};
}

inline InfectionPattern pattern_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("arms") || !j["arms"].is_array())
    throw std::invalid_argument("pattern JSON must be an object with an \"arms\" array");
  InfectionPattern p;
  for (const auto& a : j["arms"]) {
    if (!a.is_array()) throw std::invalid_argument("each arm must be an array of overlap sizes");
    Arm arm;
    for (const auto& v : a) {
      if (!v.is_number_integer())
        throw std::invalid_argument("overlap sizes must be integers");
      arm.overlaps.push_back(v.get<int>());
    }
    p.structure.arms.push_back(std::move(arm));
  }
  return p;
}

inline InfectionPattern pattern_from_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);  // throws nlohmann::json::parse_error
  return pattern_from_json(j);
}

}  // namespace hyperstar
