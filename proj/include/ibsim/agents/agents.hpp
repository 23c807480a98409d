#pragma once

// Room, EP and personal-comfort agent logic. Every function here is pure:
// agent state lives in the simulator loop and is passed in explicitly.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ibsim/pronouncer/pronouncer.hpp"
#include "ibsim/thermal/thermal.hpp"

namespace ibsim::agents {

/// Seconds since the scenario origin.
using Timestamp = std::int64_t;

inline constexpr double kSetbackTemperature = 16.0;
inline constexpr double kDesiredBand = 0.5;  // +- degC around the desired temperature
inline constexpr double kRadiatorPower = 1000.0;

struct ComfortProfile {
    std::string person;
    double preferred = 21.0;  // degC, within [10, 35]
    double weight = 1.0;      // > 0

    void validate() const;
};

struct Attendee {
    std::string person;
    double show_up_probability = 1.0;
};

struct CalendarEntry {
    std::string meeting;
    std::string room;
    Timestamp start = 0;
    std::int64_t duration = 0;  // s, > 0
    std::vector<Attendee> attendees;

    [[nodiscard]] Timestamp end() const { return start + duration; }
    void validate() const;
};

enum class BadgeKind { enter, leave };

struct BadgeEvent {
    Timestamp time = 0;
    std::string person;
    std::string room;
    BadgeKind kind = BadgeKind::enter;
};

struct ForcedPower {
    double watts = 0.0;
    friend bool operator==(const ForcedPower&, const ForcedPower&) = default;
};
struct ForcedSetpoint {
    double celsius = 0.0;
    friend bool operator==(const ForcedSetpoint&, const ForcedSetpoint&) = default;
};
using OverrideCommand = std::variant<ForcedPower, ForcedSetpoint>;

/// Manual command active on [time, expiry).
struct OverrideEvent {
    Timestamp time = 0;
    std::string room;
    OverrideCommand command;
    Timestamp expiry = 0;

    void validate() const;
};

/// One interval of (t_out - desired) in degC, [lo, hi), with its prior.
struct OutsideBin {
    std::string label;
    double lo = 0.0;
    double hi = 0.0;
    double prior = 0.0;
};

/// Bins in heating-template order, from high positive to high negative.
[[nodiscard]] std::vector<OutsideBin> default_outside_bins();

struct HeatingContext {
    thermal::ThermalParams params;
    double current_temp = kSetbackTemperature;
    double desired_temp = 22.0;
    double horizon = 3600.0;  // s
    std::vector<OutsideBin> outside_bins = default_outside_bins();
    double energy_weight = 1.0;   // utiles per kWh
    double penalty_higher = 2.0;  // utiles
    double penalty_lower = 3.0;   // utiles
    double radiator_power = kRadiatorPower;  // W per radiator, two radiators
    double vent_conductance = 50.0;          // W/K added while ventilating
    std::size_t cpt_samples = 1000;
    std::uint64_t cpt_seed = 42;

    /// Throws std::invalid_argument. Bins must match the template labels,
    /// be contiguous (bins[i].lo == bins[i+1].hi), have lo <= hi and priors
    /// summing to 1.
    void validate() const;
};

struct HeatingAction {
    std::string label;
    thermal::HeatInput input;
};

/// The template's four actions in order: no heat, one radiator, both
/// radiators, ventilate.
[[nodiscard]] std::vector<HeatingAction> heating_actions(const HeatingContext& ctx);

/// Weighted mean of preferences rounded half-up to 0.1 degC, then clamped to
/// [min, max] of the preferences. Throws std::invalid_argument when empty.
[[nodiscard]] double negotiate_setpoint(std::span<const ComfortProfile> profiles);

[[nodiscard]] double expected_attendance(const CalendarEntry& e);

struct PreheatPlan {
    double start = 0.0;     // s since origin
    double power = 0.0;     // W
    double duration = 0.0;  // s
    bool shortfall = false;

    [[nodiscard]] double energy_kwh() const { return power * duration / thermal::kJoulesPerKwh; }
};

/// Chooses the power level in {1, 2} x radiator_power whose heat-up from
/// ctx.current_temp reaches `setpoint` by e.start with the least energy
/// (ties go to the lower level). Already warm: zero-duration plan at
/// e.start. No level makes it in time: max power from `now`, shortfall set.
/// Throws std::invalid_argument if e.start < now.
[[nodiscard]] PreheatPlan plan_preheat(const CalendarEntry& e, const HeatingContext& ctx, double setpoint,
                                       double t_out_estimate, Timestamp now);

/// Result-node rows, action-major over (action, bin), outcomes ordered
/// higher, desired, lower. Each row holds empirical frequencies of the end
/// temperature after ctx.horizon seconds for t_out drawn uniformly in the bin.
[[nodiscard]] std::vector<std::vector<double>> generate_cpt(std::span<const HeatingAction> actions,
                                                            const HeatingContext& ctx, std::size_t samples,
                                                            std::uint64_t seed);

/// Heating-template query for `ctx`, CPT sampled with ctx.cpt_samples and
/// ctx.cpt_seed.
[[nodiscard]] pronouncer::Query build_heating_query(const HeatingContext& ctx, std::string requester = {});

/// Setpoint negotiated among the profiles of `present`; nullopt means vacate
/// (nobody with a profile is present).
[[nodiscard]] std::optional<double> renegotiate(const CalendarEntry& e, std::span<const std::string> present,
                                                std::span<const ComfortProfile> profiles);

/// What the room agent asks the EP agent for.
struct Control {
    double setpoint = kSetbackTemperature;
    std::optional<double> forced_power;  // W
    bool override_active = false;

    friend bool operator==(const Control&, const Control&) = default;
};

/// Applies the override active for `room` at `now` (time <= now < expiry).
/// Among several, the latest `time` wins; equal times go to the later entry.
[[nodiscard]] Control apply_override(Control agent, std::span<const OverrideEvent> overrides, const std::string& room,
                                     Timestamp now);

}  // namespace ibsim::agents
