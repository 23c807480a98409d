#include "ibsim/simulator/io.hpp"

#include <cstdio>
#include <initializer_list>

#include "ibsim/decision/json_io.hpp"

namespace ibsim::sim {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(where + " must be an object");
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) fail(where + ": unknown key \"" + k + "\"");
    }
}

const json& need(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) fail(where + ": missing \"" + key + "\"");
    return j.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where + " must be a number");
    return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where + " must be an integer");
    return v.get<std::int64_t>();
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where + " must be a string");
    return v.get<std::string>();
}

const json& optional_array(const json& j, const char* key) {
    static const json empty = json::array();
    if (!j.contains(key)) return empty;
    const auto& v = j.at(key);
    if (!v.is_array()) fail(std::string(key) + " must be an array");
    return v;
}

const json& required_array(const json& j, const char* key) {
    const auto& v = need(j, "scenario", key);
    if (!v.is_array()) fail(std::string(key) + " must be an array");
    return v;
}

Room room_from(const json& j, std::size_t i) {
    const auto where = "rooms[" + std::to_string(i) + "]";
    only_keys(j, where, {"id", "resistance", "capacitance", "initial_temp", "radiator_power", "vent_conductance"});
    Room r;
    r.id = text(need(j, where, "id"), where + ".id");
    r.params.resistance = number(need(j, where, "resistance"), where + ".resistance");
    r.params.capacitance = number(need(j, where, "capacitance"), where + ".capacitance");
    if (j.contains("initial_temp")) r.initial_temp = number(j["initial_temp"], where + ".initial_temp");
    if (j.contains("radiator_power")) r.radiator_power = number(j["radiator_power"], where + ".radiator_power");
    if (j.contains("vent_conductance")) r.vent_conductance = number(j["vent_conductance"], where + ".vent_conductance");
    return r;
}

agents::ComfortProfile profile_from(const json& j, std::size_t i) {
    const auto where = "profiles[" + std::to_string(i) + "]";
    only_keys(j, where, {"person", "preferred", "weight"});
    agents::ComfortProfile p;
    p.person = text(need(j, where, "person"), where + ".person");
    p.preferred = number(need(j, where, "preferred"), where + ".preferred");
    if (j.contains("weight")) p.weight = number(j["weight"], where + ".weight");
    return p;
}

agents::CalendarEntry meeting_from(const json& j, std::size_t i) {
    const auto where = "calendar[" + std::to_string(i) + "]";
    only_keys(j, where, {"meeting", "room", "start", "duration", "attendees"});
    agents::CalendarEntry e;
    e.meeting = text(need(j, where, "meeting"), where + ".meeting");
    e.room = text(need(j, where, "room"), where + ".room");
    e.start = integer(need(j, where, "start"), where + ".start");
    e.duration = integer(need(j, where, "duration"), where + ".duration");
    const auto& attendees = optional_array(j, "attendees");
    for (std::size_t k = 0; k < attendees.size(); ++k) {
        const auto w = where + ".attendees[" + std::to_string(k) + "]";
        only_keys(attendees[k], w, {"person", "p"});
        e.attendees.push_back({text(need(attendees[k], w, "person"), w + ".person"),
                               attendees[k].contains("p") ? number(attendees[k]["p"], w + ".p") : 1.0});
    }
    return e;
}

agents::BadgeEvent badge_from(const json& j, std::size_t i) {
    const auto where = "badges[" + std::to_string(i) + "]";
    only_keys(j, where, {"time", "person", "room", "kind"});
    agents::BadgeEvent b;
    b.time = integer(need(j, where, "time"), where + ".time");
    b.person = text(need(j, where, "person"), where + ".person");
    b.room = text(need(j, where, "room"), where + ".room");
    const auto kind = text(need(j, where, "kind"), where + ".kind");
    if (kind == "enter") {
        b.kind = agents::BadgeKind::enter;
    } else if (kind == "leave") {
        b.kind = agents::BadgeKind::leave;
    } else {
        fail(where + ".kind must be \"enter\" or \"leave\"");
    }
    return b;
}

agents::OverrideEvent override_from(const json& j, std::size_t i) {
    const auto where = "overrides[" + std::to_string(i) + "]";
    only_keys(j, where, {"time", "room", "power", "setpoint", "expiry"});
    agents::OverrideEvent o;
    o.time = integer(need(j, where, "time"), where + ".time");
    o.room = text(need(j, where, "room"), where + ".room");
    o.expiry = integer(need(j, where, "expiry"), where + ".expiry");
    if (j.contains("power") == j.contains("setpoint")) fail(where + " needs exactly one of \"power\", \"setpoint\"");
    if (j.contains("power")) {
        o.command = agents::ForcedPower{number(j["power"], where + ".power")};
    } else {
        o.command = agents::ForcedSetpoint{number(j["setpoint"], where + ".setpoint")};
    }
    return o;
}

json read_file(const std::filesystem::path& path) {
    try {
        return decision::read_json_file(path);
    } catch (const decision::FormatError& e) {
        fail(e.what());
    }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    only_keys(j, "scenario", {"rooms", "profiles", "calendar", "badges", "overrides", "weather", "seed", "horizon"});
    Scenario s;
    const auto& rooms = required_array(j, "rooms");
    for (std::size_t i = 0; i < rooms.size(); ++i) s.rooms.push_back(room_from(rooms[i], i));
    const auto& profiles = optional_array(j, "profiles");
    for (std::size_t i = 0; i < profiles.size(); ++i) s.profiles.push_back(profile_from(profiles[i], i));
    const auto& calendar = optional_array(j, "calendar");
    for (std::size_t i = 0; i < calendar.size(); ++i) s.calendar.push_back(meeting_from(calendar[i], i));
    const auto& badges = optional_array(j, "badges");
    for (std::size_t i = 0; i < badges.size(); ++i) s.badges.push_back(badge_from(badges[i], i));
    const auto& overrides = optional_array(j, "overrides");
    for (std::size_t i = 0; i < overrides.size(); ++i) s.overrides.push_back(override_from(overrides[i], i));
    const auto& weather = required_array(j, "weather");
    for (std::size_t i = 0; i < weather.size(); ++i) {
        const auto where = "weather[" + std::to_string(i) + "]";
        const auto& w = weather[i];
        if (!w.is_array() || w.size() != 2) fail(where + " must be [time, temperature]");
        s.weather.push_back({integer(w[0], where + "[0]"), number(w[1], where + "[1]")});
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail("seed must be a non-negative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    s.horizon = integer(need(j, "scenario", "horizon"), "horizon");
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_file(path)); }

SimConfig config_from_json(const json& j) {
    only_keys(j, "config",
              {"dt", "setback", "renegotiation_delay", "lead_margin", "lead_cap", "attendance_threshold", "preheat",
               "template", "energy_weight", "penalty_higher", "penalty_lower", "cpt_samples", "prior_sd"});
    SimConfig c;
    if (j.contains("dt")) c.dt = integer(j["dt"], "dt");
    if (j.contains("setback")) c.setback = number(j["setback"], "setback");
    if (j.contains("renegotiation_delay")) c.renegotiation_delay = integer(j["renegotiation_delay"], "renegotiation_delay");
    if (j.contains("lead_margin")) c.lead_margin = integer(j["lead_margin"], "lead_margin");
    if (j.contains("lead_cap")) c.lead_cap = integer(j["lead_cap"], "lead_cap");
    if (j.contains("attendance_threshold")) {
        c.attendance_threshold = number(j["attendance_threshold"], "attendance_threshold");
    }
    if (j.contains("preheat")) {
        if (!j["preheat"].is_boolean()) fail("preheat must be a boolean");
        c.preheat = j["preheat"].get<bool>();
    }
    if (j.contains("template")) c.template_id = text(j["template"], "template");
    if (j.contains("energy_weight")) c.energy_weight = number(j["energy_weight"], "energy_weight");
    if (j.contains("penalty_higher")) c.penalty_higher = number(j["penalty_higher"], "penalty_higher");
    if (j.contains("penalty_lower")) c.penalty_lower = number(j["penalty_lower"], "penalty_lower");
    if (j.contains("cpt_samples")) {
        const auto n = integer(j["cpt_samples"], "cpt_samples");
        if (n <= 0) fail("cpt_samples must be >= 1");
        c.cpt_samples = static_cast<std::size_t>(n);
    }
    if (j.contains("prior_sd")) c.prior_sd = number(j["prior_sd"], "prior_sd");
    c.validate();
    return c;
}

SimConfig load_config(const std::filesystem::path& path) { return config_from_json(read_file(path)); }

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
    out << "time,room,temp,setpoint,power,occupants,override_active\n";
    char buf[160];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof(buf), "%lld,", static_cast<long long>(r.time));
        out << buf << r.room;
        std::snprintf(buf, sizeof(buf), ",%.6f,%.2f,%.1f,%d,%d\n", r.temp, r.setpoint, r.power, r.occupants,
                      r.override_active ? 1 : 0);
        out << buf;
    }
}

nlohmann::ordered_json metrics_to_json(const Metrics& m) {
    return {{"heating_energy", m.heating_energy},
            {"comfort_deviation", m.comfort_deviation},
            {"advice_count", m.advice_count},
            {"shortfalls", m.shortfalls},
            {"occupied_hours", m.occupied_hours}};
}

Metrics metrics_from_json(const json& j) {
    only_keys(j, "metrics", {"heating_energy", "comfort_deviation", "advice_count", "shortfalls", "occupied_hours"});
    Metrics m;
    m.heating_energy = number(need(j, "metrics", "heating_energy"), "heating_energy");
    m.comfort_deviation = number(need(j, "metrics", "comfort_deviation"), "comfort_deviation");
    if (j.contains("advice_count")) m.advice_count = static_cast<std::size_t>(integer(j["advice_count"], "advice_count"));
    if (j.contains("shortfalls")) m.shortfalls = static_cast<std::size_t>(integer(j["shortfalls"], "shortfalls"));
    if (j.contains("occupied_hours")) m.occupied_hours = number(j["occupied_hours"], "occupied_hours");
    if (m.heating_energy < 0.0 || m.comfort_deviation < 0.0 || m.occupied_hours < 0.0) fail("metrics must be >= 0");
    return m;
}

Metrics load_metrics(const std::filesystem::path& path) { return metrics_from_json(read_file(path)); }

nlohmann::ordered_json savings_to_json(const SavingsReport& r) {
    return {{"agent_energy", r.agent_energy},
            {"baseline_energy", r.baseline_energy},
            {"percent_saved", r.percent_saved},
            {"comfort_delta", r.comfort_delta}};
}

}  // namespace ibsim::sim
