#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ibsim/decision/diagram.hpp"
#include "ibsim/decision/evaluate.hpp"
#include "ibsim/decision/tree.hpp"

namespace ibsim::decision {

/// Malformed document: wrong types, missing keys, unknown keys.
class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Diagram documents carry the keys "decisions", "chances", "utility" and
// "decision_order"; see docs/diagram-format.md. Structural validity is not
// checked here, only shape.
[[nodiscard]] nlohmann::json diagram_to_json(const InfluenceDiagram& d);
[[nodiscard]] InfluenceDiagram diagram_from_json(const nlohmann::json& j);

// Tree documents: {"root": node} with node one of
//   {"decision": label, "info": state, "children": [{"action": a, "node": node}, ...]}
//   {"chance": label, "children": [{"outcome": o, "p": x, "node": node}, ...]}
//   {"utility": x}
[[nodiscard]] nlohmann::json tree_to_json(const DecisionTree& t);
[[nodiscard]] DecisionTree tree_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json evaluation_to_json(const Evaluation& e);

[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);
[[nodiscard]] InfluenceDiagram load_diagram(const std::filesystem::path& path);
void save_diagram(const InfluenceDiagram& d, const std::filesystem::path& path);

}  // namespace ibsim::decision
