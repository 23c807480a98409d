#pragma once

// First-order lumped RC model of a single room:
//
//     C dT/dt = P - (T - T_out) (1/R + G_vent)
//
// R is the thermal resistance to outdoors (K/W), C the thermal capacitance
// (J/K), P the radiator power (W, 100 % efficient) and G_vent an extra loss
// conductance while ventilating (W/K). Solar gain, occupants and equipment
// are not modeled.

#include <optional>
#include <span>
#include <stdexcept>

namespace ibsim::thermal {

inline constexpr double kMinTemperature = -50.0;
inline constexpr double kMaxTemperature = 60.0;
inline constexpr double kJoulesPerKwh = 3.6e6;

struct ThermalParams {
    double resistance = 1.0e-2;   // K/W
    double capacitance = 2.0e6;   // J/K

    /// Throws std::invalid_argument unless both are finite and > 0.
    void validate() const;
};

struct RoomThermalState {
    double temperature = 16.0;  // degC
};

struct HeatInput {
    double power = 0.0;                   // W
    double vent_extra_conductance = 0.0;  // W/K

    void validate() const;
};

struct StepResult {
    RoomThermalState state;
    bool clamped = false;
};

class StabilityError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// 1/R + G_vent, in W/K.
[[nodiscard]] double effective_conductance(const ThermalParams& p, const HeatInput& h);
/// Steady-state temperature t_out + P/k.
[[nodiscard]] double equilibrium_temp(const ThermalParams& p, const HeatInput& h, double t_out);
/// C/k, in seconds.
[[nodiscard]] double time_constant(const ThermalParams& p, const HeatInput& h);
/// Largest dt accepted by step(): C*R/10.
[[nodiscard]] double max_stable_dt(const ThermalParams& p);

/// Forward-Euler update. Throws StabilityError if dt <= 0 or exceeds
/// max_stable_dt(p). The result is clamped to [kMinTemperature,
/// kMaxTemperature] and `clamped` reports whether that happened.
[[nodiscard]] StepResult step(RoomThermalState s, const ThermalParams& p, const HeatInput& h, double t_out,
                              double dt);

/// Exact update for constant inputs over dt (no stability limit).
[[nodiscard]] StepResult step_exact(RoomThermalState s, const ThermalParams& p, const HeatInput& h, double t_out,
                                    double dt);

/// Closed-form T(t) = T_inf + (t0 - T_inf) exp(-t / tau).
[[nodiscard]] double analytic_temp(const ThermalParams& p, double t0, const HeatInput& h, double t_out, double t);

/// Seconds until the room first reaches `target`, or nullopt if it never
/// does (target beyond or at the equilibrium, or on the wrong side of t0).
[[nodiscard]] std::optional<double> time_to_target(const ThermalParams& p, double t0, double target,
                                                   const HeatInput& h, double t_out);

struct ScheduleEntry {
    double power = 0.0;     // W
    double duration = 0.0;  // s
};

/// Sum of power * duration, in kWh. Throws std::invalid_argument on a
/// negative duration.
[[nodiscard]] double energy_of_schedule(std::span<const ScheduleEntry> schedule);

}  // namespace ibsim::thermal
