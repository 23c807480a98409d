#include "ibsim/simulator/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ibsim::sim {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

}  // namespace

const Room* Scenario::find_room(const std::string& id) const {
    for (const auto& r : rooms) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

const agents::ComfortProfile* Scenario::find_profile(const std::string& person) const {
    for (const auto& p : profiles) {
        if (p.person == person) return &p;
    }
    return nullptr;
}

double Scenario::outdoor_temp(Timestamp t) const {
    if (weather.empty()) return 0.0;
    if (t <= weather.front().time) return weather.front().temperature;
    if (t >= weather.back().time) return weather.back().temperature;
    const auto hi = std::upper_bound(weather.begin(), weather.end(), t,
                                     [](Timestamp v, const WeatherPoint& w) { return v < w.time; });
    const auto lo = hi - 1;
    const double f = static_cast<double>(t - lo->time) / static_cast<double>(hi->time - lo->time);
    return lo->temperature + f * (hi->temperature - lo->temperature);
}

void Scenario::validate() const {
    if (horizon < 0) fail("horizon must be >= 0");
    if (rooms.empty()) fail("scenario needs at least one room");
    std::set<std::string> room_ids;
    for (const auto& r : rooms) {
        if (r.id.empty() || !room_ids.insert(r.id).second) fail("room ids must be unique and non-empty");
        try {
            r.params.validate();
        } catch (const std::invalid_argument& e) {
            fail("room " + r.id + ": " + e.what());
        }
        if (!std::isfinite(r.initial_temp)) fail("room " + r.id + ": initial_temp must be finite");
        if (!(std::isfinite(r.radiator_power) && r.radiator_power > 0.0)) {
            fail("room " + r.id + ": radiator_power must be positive");
        }
        if (!(std::isfinite(r.vent_conductance) && r.vent_conductance >= 0.0)) {
            fail("room " + r.id + ": vent_conductance must be >= 0");
        }
    }

    std::set<std::string> people;
    for (const auto& p : profiles) {
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            fail(std::string("profile: ") + e.what());
        }
        if (!people.insert(p.person).second) fail("duplicate profile for " + p.person);
    }

    std::set<std::string> meetings;
    std::map<std::string, std::vector<const agents::CalendarEntry*>> per_room;
    for (const auto& e : calendar) {
        try {
            e.validate();
        } catch (const std::invalid_argument& ex) {
            fail(std::string("calendar: ") + ex.what());
        }
        if (!meetings.insert(e.meeting).second) fail("duplicate meeting id " + e.meeting);
        if (!room_ids.contains(e.room)) fail("meeting " + e.meeting + " references unknown room " + e.room);
        std::set<std::string> seen;
        for (const auto& a : e.attendees) {
            if (!people.contains(a.person)) fail("meeting " + e.meeting + " lists unknown person " + a.person);
            if (!seen.insert(a.person).second) fail("meeting " + e.meeting + " lists " + a.person + " twice");
        }
        per_room[e.room].push_back(&e);
    }
    for (auto& [room, list] : per_room) {
        std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->start < b->start; });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i]->start < list[i - 1]->end()) {
                fail("meetings " + list[i - 1]->meeting + " and " + list[i]->meeting + " overlap in room " + room);
            }
        }
    }

    for (std::size_t i = 0; i < badges.size(); ++i) {
        const auto& b = badges[i];
        if (i > 0 && b.time < badges[i - 1].time) fail("badge events are not chronological");
        if (!room_ids.contains(b.room)) fail("badge event references unknown room " + b.room);
        if (!people.contains(b.person)) fail("badge event references unknown person " + b.person);
    }

    for (std::size_t i = 0; i < overrides.size(); ++i) {
        const auto& o = overrides[i];
        try {
            o.validate();
        } catch (const std::invalid_argument& e) {
            fail(std::string("override: ") + e.what());
        }
        if (i > 0 && o.time < overrides[i - 1].time) fail("overrides are not chronological");
        if (!room_ids.contains(o.room)) fail("override references unknown room " + o.room);
    }

    if (weather.empty()) fail("weather trace is empty");
    for (std::size_t i = 0; i < weather.size(); ++i) {
        if (!std::isfinite(weather[i].temperature)) fail("weather temperature must be finite");
        if (i > 0 && weather[i].time <= weather[i - 1].time) fail("weather times must be strictly increasing");
    }
}

void SimConfig::validate() const {
    if (dt <= 0) fail("dt must be > 0");
    if (renegotiation_delay < 0) fail("renegotiation_delay must be >= 0");
    if (lead_margin < 0 || lead_cap < 0) fail("lead_margin and lead_cap must be >= 0");
    if (!std::isfinite(setback)) fail("setback must be finite");
    if (!(attendance_threshold >= 0.0)) fail("attendance_threshold must be >= 0");
    if (!(energy_weight >= 0.0 && penalty_higher >= 0.0 && penalty_lower >= 0.0)) {
        fail("energy_weight and penalties must be >= 0");
    }
    if (cpt_samples == 0) fail("cpt_samples must be >= 1");
    if (!(std::isfinite(prior_sd) && prior_sd > 0.0)) fail("prior_sd must be > 0");
}

std::vector<agents::OutsideBin> forecast_bins(double mean_difference, double sd) {
    auto bins = agents::default_outside_bins();
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean_difference) / (sd * std::sqrt(2.0))); };
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double upper = i == 0 ? 1.0 : cdf(bins[i].hi);
        const double lower = i + 1 == bins.size() ? 0.0 : cdf(bins[i].lo);
        bins[i].prior = upper - lower;
    }
    // End bins only span the plausible part of the forecast.
    auto& top = bins.front();
    auto& bottom = bins.back();
    top.hi = std::max(top.lo, std::min(top.hi, mean_difference + 4.0 * sd));
    bottom.lo = std::min(bottom.hi, std::max(bottom.lo, mean_difference - 4.0 * sd));
    return bins;
}

SavingsReport compare(const Metrics& agent, const Metrics& baseline) {
    if (!(baseline.heating_energy > 0.0)) throw std::invalid_argument("baseline used no heating energy");
    SavingsReport r;
    r.agent_energy = agent.heating_energy;
    r.baseline_energy = baseline.heating_energy;
    r.percent_saved = 100.0 * (1.0 - agent.heating_energy / baseline.heating_energy);
    r.comfort_delta = agent.comfort_deviation - baseline.comfort_deviation;
    return r;
}

namespace {

struct MeetingState {
    const agents::CalendarEntry* entry = nullptr;
    std::size_t log_index = 0;
    double setpoint = 0.0;  // negotiated among planned attendees
    bool planned = false;
    bool renegotiated = false;
    bool vacated = false;
    std::optional<agents::PreheatPlan> plan;
    std::optional<thermal::HeatInput> preheat_input;
};

struct RoomState {
    const Room* room = nullptr;
    double temp = 0.0;
    std::set<std::string> present;
    std::vector<MeetingState> meetings;  // by start time
};

// Agent output for one tick, before overrides.
struct AgentCommand {
    agents::Control control;
    std::optional<thermal::HeatInput> preheat;  // fixed action instead of the thermostat
};

class Engine {
public:
    Engine(const Scenario& s, const SimConfig& c, const pronouncer::Pronouncer* p, std::optional<double> constant)
        : s_(s), c_(c), pronouncer_(p), constant_(constant) {
        s.validate();
        c.validate();
        for (const auto& r : s.rooms) rooms_.push_back({&r, r.initial_temp, {}, {}});
        if (constant_) return;
        for (std::size_t i = 0; i < s.calendar.size(); ++i) {
            const auto& e = s.calendar[i];
            auto& rs = *std::find_if(rooms_.begin(), rooms_.end(), [&](const RoomState& r) { return r.room->id == e.room; });
            MeetingState m;
            m.entry = &e;
            m.log_index = i;
            m.setpoint = planned_setpoint(e);
            rs.meetings.push_back(m);
            result_.meetings.push_back({e.meeting, 0, m.setpoint, agents::expected_attendance(e), {}, {}, {}, {}});
        }
        for (auto& rs : rooms_) {
            std::stable_sort(rs.meetings.begin(), rs.meetings.end(),
                             [](const MeetingState& a, const MeetingState& b) { return a.entry->start < b.entry->start; });
        }
    }

    RunResult run() {
        std::size_t next_badge = 0;
        for (Timestamp t = 0; t < s_.horizon; t += c_.dt) {
            const double dt = static_cast<double>(std::min<Timestamp>(c_.dt, s_.horizon - t));
            const double t_out = s_.outdoor_temp(t);
            for (; next_badge < s_.badges.size() && s_.badges[next_badge].time <= t; ++next_badge) {
                const auto& b = s_.badges[next_badge];
                auto& present = room_state(b.room).present;
                if (b.kind == agents::BadgeKind::enter) {
                    present.insert(b.person);
                } else {
                    present.erase(b.person);
                }
            }
            for (auto& rs : rooms_) {
                const AgentCommand cmd = constant_ ? AgentCommand{{*constant_, {}, false}, {}} : decide(rs, t);
                const auto control = agents::apply_override(cmd.control, s_.overrides, rs.room->id, t);
                thermal::HeatInput input;
                if (control.forced_power) {
                    input.power = *control.forced_power;
                } else if (cmd.preheat && !control.override_active) {
                    input = *cmd.preheat;
                    if (rs.temp >= control.setpoint) input.power = 0.0;
                } else {
                    input.power = rs.temp < control.setpoint ? rs.room->max_power() : 0.0;
                }
                const int occupants = static_cast<int>(rs.present.size());
                result_.trace.push_back({t, rs.room->id, rs.temp, control.setpoint, input.power, occupants,
                                         control.override_active, t_out, input.vent_extra_conductance, dt});
                auto& m = result_.metrics;
                m.heating_energy += input.power * dt / thermal::kJoulesPerKwh;
                if (occupants > 0) {
                    m.comfort_deviation += std::abs(rs.temp - control.setpoint) * dt / 3600.0;
                    m.occupied_hours += dt / 3600.0;
                }
                rs.temp = thermal::step({rs.temp}, rs.room->params, input, t_out, dt).state.temperature;
            }
        }
        return std::move(result_);
    }

private:
    RoomState& room_state(const std::string& id) {
        return *std::find_if(rooms_.begin(), rooms_.end(), [&](const RoomState& r) { return r.room->id == id; });
    }

    double planned_setpoint(const agents::CalendarEntry& e) const {
        std::vector<agents::ComfortProfile> ps;
        for (const auto& a : e.attendees) ps.push_back(*s_.find_profile(a.person));
        return ps.empty() ? c_.setback : agents::negotiate_setpoint(ps);
    }

    Timestamp lead_time(const RoomState& rs, const MeetingState& m) const {
        const auto t = thermal::time_to_target(rs.room->params, rs.temp, m.setpoint, {rs.room->radiator_power, 0.0},
                                               s_.outdoor_temp(m.entry->start));
        if (rs.temp >= m.setpoint) return std::min(c_.lead_margin, c_.lead_cap);
        if (!t) return c_.lead_cap;
        return std::min(static_cast<Timestamp>(std::ceil(*t)) + c_.lead_margin, c_.lead_cap);
    }

    double mean_outdoor(Timestamp from, Timestamp to) const {
        double sum = 0.0;
        int n = 0;
        for (Timestamp t = from; t <= to; t += c_.dt, ++n) sum += s_.outdoor_temp(t);
        return n ? sum / n : s_.outdoor_temp(from);
    }

    void plan(RoomState& rs, MeetingState& m, Timestamp now) {
        m.planned = true;
        auto& log = result_.meetings[m.log_index];
        log.planned_at = now;
        const auto& e = *m.entry;
        if (!c_.preheat || now >= e.start || e.attendees.empty()) return;
        if (agents::expected_attendance(e) < c_.attendance_threshold) return;

        const double t_out_estimate = mean_outdoor(now, e.start);
        agents::HeatingContext ctx;
        ctx.params = rs.room->params;
        ctx.current_temp = rs.temp;
        ctx.desired_temp = m.setpoint;
        ctx.radiator_power = rs.room->radiator_power;
        ctx.vent_conductance = rs.room->vent_conductance;
        m.plan = agents::plan_preheat(e, ctx, m.setpoint, t_out_estimate, now);
        log.plan = m.plan;
        if (m.plan->shortfall) ++result_.metrics.shortfalls;
        if (m.plan->duration <= 0.0) return;

        ctx.horizon = m.plan->duration;
        ctx.outside_bins = forecast_bins(t_out_estimate - m.setpoint, c_.prior_sd);
        ctx.energy_weight = c_.energy_weight;
        ctx.penalty_higher = c_.penalty_higher;
        ctx.penalty_lower = c_.penalty_lower;
        ctx.cpt_samples = c_.cpt_samples;
        ctx.cpt_seed = s_.seed * 0x9E3779B97F4A7C15ULL + m.log_index;
        auto query = agents::build_heating_query(ctx, rs.room->id);
        query.template_id = c_.template_id;
        const auto advice = pronouncer_->pronounce(query);
        ++result_.metrics.advice_count;
        log.action = advice.action;
        for (const auto& a : agents::heating_actions(ctx)) {
            if (a.label == advice.action) m.preheat_input = a.input;
        }
    }

    AgentCommand decide(RoomState& rs, Timestamp t) {
        AgentCommand cmd{{c_.setback, {}, false}, {}};
        bool in_meeting = false;
        for (auto& m : rs.meetings) {
            const auto& e = *m.entry;
            if (t >= e.end()) continue;
            if (!m.planned) {
                if (t < e.start - lead_time(rs, m)) continue;
                plan(rs, m, t);
            }
            if (t >= e.start) {
                if (!m.renegotiated && t >= e.start + c_.renegotiation_delay) {
                    m.renegotiated = true;
                    const std::vector<std::string> present(rs.present.begin(), rs.present.end());
                    const auto next = agents::renegotiate(e, present, s_.profiles);
                    if (next) {
                        m.setpoint = *next;
                    } else {
                        m.vacated = true;
                    }
                    auto& log = result_.meetings[m.log_index];
                    log.renegotiated_at = t;
                    log.renegotiated_setpoint = next;
                }
                cmd = {{m.vacated ? c_.setback : m.setpoint, {}, false}, {}};
                in_meeting = true;
            } else if (!in_meeting && m.preheat_input && m.plan->duration > 0.0 &&
                       static_cast<double>(t + c_.dt) > m.plan->start) {
                cmd = {{m.setpoint, {}, false}, m.preheat_input};
            }
        }
        return cmd;
    }

    const Scenario& s_;
    const SimConfig& c_;
    const pronouncer::Pronouncer* pronouncer_;
    std::optional<double> constant_;
    std::vector<RoomState> rooms_;
    RunResult result_;
};

}  // namespace

RunResult run(const Scenario& s, const SimConfig& c, const pronouncer::Pronouncer& p) {
    return Engine(s, c, &p, std::nullopt).run();
}

RunResult run(const Scenario& s, const SimConfig& c) {
    const auto p = pronouncer::make_default_pronouncer();
    return run(s, c, *p);
}

RunResult run_baseline(const Scenario& s, const SimConfig& c, double constant_setpoint) {
    if (!std::isfinite(constant_setpoint)) throw ScenarioError("baseline setpoint must be finite");
    return Engine(s, c, nullptr, constant_setpoint).run();
}

}  // namespace ibsim::sim
