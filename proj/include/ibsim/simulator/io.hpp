#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ibsim/simulator/simulator.hpp"

namespace ibsim::sim {

/// Parses and validates a scenario document. Throws ScenarioError.
[[nodiscard]] Scenario scenario_from_json(const nlohmann::json& j);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// All keys optional; unknown keys rejected. Throws ScenarioError.
[[nodiscard]] SimConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] SimConfig load_config(const std::filesystem::path& path);

/// Header time,room,temp,setpoint,power,occupants,override_active.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

[[nodiscard]] nlohmann::ordered_json metrics_to_json(const Metrics& m);
[[nodiscard]] Metrics metrics_from_json(const nlohmann::json& j);
[[nodiscard]] Metrics load_metrics(const std::filesystem::path& path);
[[nodiscard]] nlohmann::ordered_json savings_to_json(const SavingsReport& r);

}  // namespace ibsim::sim
