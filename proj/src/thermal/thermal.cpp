#include "ibsim/thermal/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ibsim::thermal {

void ThermalParams::validate() const {
    if (!(std::isfinite(resistance) && resistance > 0.0)) {
        throw std::invalid_argument("thermal resistance must be finite and positive");
    }
    if (!(std::isfinite(capacitance) && capacitance > 0.0)) {
        throw std::invalid_argument("thermal capacitance must be finite and positive");
    }
}

void HeatInput::validate() const {
    if (!(std::isfinite(power) && power >= 0.0)) throw std::invalid_argument("heating power must be >= 0");
    if (!(std::isfinite(vent_extra_conductance) && vent_extra_conductance >= 0.0)) {
        throw std::invalid_argument("ventilation conductance must be >= 0");
    }
}

double effective_conductance(const ThermalParams& p, const HeatInput& h) {
    return 1.0 / p.resistance + h.vent_extra_conductance;
}

double equilibrium_temp(const ThermalParams& p, const HeatInput& h, double t_out) {
    return t_out + h.power / effective_conductance(p, h);
}

double time_constant(const ThermalParams& p, const HeatInput& h) {
    return p.capacitance / effective_conductance(p, h);
}

double max_stable_dt(const ThermalParams& p) {
    return p.capacitance * p.resistance / 10.0;
}

namespace {

StepResult clamp_state(double t) {
    const double c = std::clamp(t, kMinTemperature, kMaxTemperature);
    return {{c}, c != t};
}

}  // namespace

StepResult step(RoomThermalState s, const ThermalParams& p, const HeatInput& h, double t_out, double dt) {
    if (!(dt > 0.0) || dt > max_stable_dt(p)) {
        throw StabilityError("time step " + std::to_string(dt) + " s outside (0, " +
                             std::to_string(max_stable_dt(p)) + "]");
    }
    const double k = effective_conductance(p, h);
    const double next = s.temperature + (dt / p.capacitance) * (h.power - (s.temperature - t_out) * k);
    return clamp_state(next);
}

StepResult step_exact(RoomThermalState s, const ThermalParams& p, const HeatInput& h, double t_out, double dt) {
    if (!(dt > 0.0)) throw StabilityError("time step must be positive");
    return clamp_state(analytic_temp(p, s.temperature, h, t_out, dt));
}

double analytic_temp(const ThermalParams& p, double t0, const HeatInput& h, double t_out, double t) {
    if (t < 0.0) throw std::invalid_argument("negative time");
    const double t_inf = equilibrium_temp(p, h, t_out);
    return t_inf + (t0 - t_inf) * std::exp(-t / time_constant(p, h));
}

std::optional<double> time_to_target(const ThermalParams& p, double t0, double target, const HeatInput& h,
                                     double t_out) {
    if (target == t0) return 0.0;
    const double t_inf = equilibrium_temp(p, h, t_out);
    const bool between = (t0 < target && target < t_inf) || (t_inf < target && target < t0);
    if (!between) return std::nullopt;
    return time_constant(p, h) * std::log((t0 - t_inf) / (target - t_inf));
}

double energy_of_schedule(std::span<const ScheduleEntry> schedule) {
    double joules = 0.0;
    for (const auto& e : schedule) {
        if (e.duration < 0.0) throw std::invalid_argument("negative duration in schedule");
        joules += e.power * e.duration;
    }
    return joules / kJoulesPerKwh;
}

}  // namespace ibsim::thermal
