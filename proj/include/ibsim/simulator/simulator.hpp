#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibsim/agents/agents.hpp"
#include "ibsim/pronouncer/pronouncer.hpp"
#include "ibsim/thermal/thermal.hpp"

namespace ibsim::sim {

using agents::Timestamp;

class ScenarioError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Room {
    std::string id;
    thermal::ThermalParams params;
    double initial_temp = agents::kSetbackTemperature;
    double radiator_power = agents::kRadiatorPower;  // W each, two radiators
    double vent_conductance = 50.0;                  // W/K

    [[nodiscard]] double max_power() const { return 2.0 * radiator_power; }
};

/// Outdoor temperature sample; the trace is linear between samples and
/// constant beyond its ends.
struct WeatherPoint {
    Timestamp time = 0;
    double temperature = 0.0;
};

struct Scenario {
    std::vector<Room> rooms;
    std::vector<agents::CalendarEntry> calendar;
    std::vector<agents::ComfortProfile> profiles;
    std::vector<agents::BadgeEvent> badges;
    std::vector<agents::OverrideEvent> overrides;
    std::vector<WeatherPoint> weather;
    std::uint64_t seed = 0;
    Timestamp horizon = 0;

    /// Throws ScenarioError.
    void validate() const;
    [[nodiscard]] double outdoor_temp(Timestamp t) const;
    [[nodiscard]] const Room* find_room(const std::string& id) const;
    [[nodiscard]] const agents::ComfortProfile* find_profile(const std::string& person) const;
};

struct SimConfig {
    std::int64_t dt = 60;
    double setback = agents::kSetbackTemperature;
    std::int64_t renegotiation_delay = 300;
    std::int64_t lead_margin = 600;    // added to the one-radiator heat-up time
    std::int64_t lead_cap = 4 * 3600;  // upper bound on the planning lead
    double attendance_threshold = 0.5;
    bool preheat = true;  // false: setback until the meeting starts

    // Pronouncer query settings.
    std::string template_id = pronouncer::heating::kTemplateId;
    double energy_weight = 1.0;
    double penalty_higher = 10.0;
    double penalty_lower = 20.0;
    std::size_t cpt_samples = 1000;
    double prior_sd = 3.0;  // K, spread of the outdoor forecast

    /// Throws ScenarioError.
    void validate() const;
};

struct Metrics {
    double heating_energy = 0.0;     // kWh
    double comfort_deviation = 0.0;  // degree-hours while occupied
    std::size_t advice_count = 0;
    std::size_t shortfalls = 0;
    double occupied_hours = 0.0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// State of one room over [time, time + dt).
struct TraceRow {
    Timestamp time = 0;
    std::string room;
    double temp = 0.0;  // at `time`
    double setpoint = 0.0;
    double power = 0.0;
    int occupants = 0;
    bool override_active = false;
    double t_out = 0.0;
    double vent_conductance = 0.0;
    double dt = 0.0;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// What the room agent did for one meeting.
struct MeetingLog {
    std::string meeting;
    Timestamp planned_at = 0;
    double setpoint = 0.0;
    double expected_attendance = 0.0;
    std::optional<agents::PreheatPlan> plan;
    std::string action;  // empty when no query was made
    std::optional<Timestamp> renegotiated_at;
    std::optional<double> renegotiated_setpoint;  // nullopt after renegotiation: vacated
};

struct RunResult {
    Metrics metrics;
    std::vector<TraceRow> trace;
    std::vector<MeetingLog> meetings;
};

/// Agent-controlled run. Deterministic for a given (scenario, config).
[[nodiscard]] RunResult run(const Scenario& s, const SimConfig& c, const pronouncer::Pronouncer& p);
[[nodiscard]] RunResult run(const Scenario& s, const SimConfig& c);

/// Constant-setpoint thermostat at max power, no agents. Overrides still
/// apply.
[[nodiscard]] RunResult run_baseline(const Scenario& s, const SimConfig& c, double constant_setpoint = 22.0);

struct SavingsReport {
    double agent_energy = 0.0;
    double baseline_energy = 0.0;
    double percent_saved = 0.0;
    double comfort_delta = 0.0;  // agent - baseline, degree-hours
};

/// Throws std::invalid_argument when baseline.heating_energy <= 0.
[[nodiscard]] SavingsReport compare(const Metrics& agent, const Metrics& baseline);

/// Prior over the heating template's outdoor bins for a normal forecast of
/// t_out - setpoint with the given mean and spread; tails go to the end bins,
/// whose outer edges are pulled in to mean +- 4 sd.
[[nodiscard]] std::vector<agents::OutsideBin> forecast_bins(double mean_difference, double sd);

}  // namespace ibsim::sim
