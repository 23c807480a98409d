#include "ibsim/agents/agents.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ibsim/pronouncer/template.hpp"

namespace ibsim::agents {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw std::invalid_argument(what); }

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Turns counts into frequencies whose sum is exactly 1 in any order: every
// entry is a multiple of 2^-52, the largest one takes the residual.
std::vector<double> frequencies(const std::vector<std::size_t>& counts, std::size_t total) {
    std::vector<double> row(counts.size());
    std::size_t largest = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] > counts[largest]) largest = i;
    }
    double rest = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i == largest) continue;
        const double p = static_cast<double>(counts[i]) / static_cast<double>(total);
        row[i] = std::ldexp(std::round(std::ldexp(p, 52)), -52);
        rest += row[i];
    }
    row[largest] = 1.0 - rest;
    return row;
}

}  // namespace

void ComfortProfile::validate() const {
    if (person.empty()) invalid("comfort profile without a person");
    if (!(preferred >= 10.0 && preferred <= 35.0)) invalid("preferred temperature of " + person + " outside [10, 35]");
    if (!(std::isfinite(weight) && weight > 0.0)) invalid("weight of " + person + " must be positive");
}

void CalendarEntry::validate() const {
    if (meeting.empty()) invalid("calendar entry without an id");
    if (room.empty()) invalid("meeting " + meeting + " has no room");
    if (duration <= 0) invalid("meeting " + meeting + " must have a positive duration");
    for (const auto& a : attendees) {
        if (a.person.empty()) invalid("meeting " + meeting + " lists an unnamed attendee");
        if (!(a.show_up_probability >= 0.0 && a.show_up_probability <= 1.0)) {
            invalid("show-up probability of " + a.person + " outside [0, 1]");
        }
    }
}

void OverrideEvent::validate() const {
    if (room.empty()) invalid("override without a room");
    if (expiry <= time) invalid("override expiry must come after its time");
    if (const auto* p = std::get_if<ForcedPower>(&command)) {
        if (!(std::isfinite(p->watts) && p->watts >= 0.0)) invalid("forced power must be >= 0");
    } else if (!std::isfinite(std::get<ForcedSetpoint>(command).celsius)) {
        invalid("forced setpoint must be finite");
    }
}

std::vector<OutsideBin> default_outside_bins() {
    const auto& labels = pronouncer::heating::kOutsideBins;
    return {{labels[0], 10.0, 40.0, 0.2},
            {labels[1], 2.0, 10.0, 0.2},
            {labels[2], -2.0, 2.0, 0.2},
            {labels[3], -10.0, -2.0, 0.2},
            {labels[4], -40.0, -10.0, 0.2}};
}

void HeatingContext::validate() const {
    params.validate();
    if (!std::isfinite(current_temp) || !std::isfinite(desired_temp)) invalid("temperatures must be finite");
    if (!(std::isfinite(horizon) && horizon >= 0.0)) invalid("horizon must be >= 0");
    const auto& labels = pronouncer::heating::kOutsideBins;
    if (outside_bins.size() != labels.size()) invalid("expected 5 outside bins");
    double sum = 0.0;
    for (std::size_t i = 0; i < outside_bins.size(); ++i) {
        const auto& b = outside_bins[i];
        if (b.label != labels[i]) invalid("outside bin " + std::to_string(i) + " must be labeled " + labels[i]);
        if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) invalid("bin " + b.label + " has lo > hi");
        if (i + 1 < outside_bins.size() && outside_bins[i + 1].hi != b.lo) {
            invalid("bins " + b.label + " and " + outside_bins[i + 1].label + " are not contiguous");
        }
        if (!(b.prior >= 0.0 && b.prior <= 1.0)) invalid("prior of bin " + b.label + " outside [0, 1]");
        sum += b.prior;
    }
    if (std::abs(sum - 1.0) > decision::kProbabilityTolerance) invalid("bin priors must sum to 1");
    if (!(energy_weight >= 0.0) || !(penalty_higher >= 0.0) || !(penalty_lower >= 0.0)) {
        invalid("energy weight and penalties must be >= 0");
    }
    if (!(radiator_power > 0.0) || !(vent_conductance >= 0.0)) invalid("bad radiator power or vent conductance");
    if (cpt_samples == 0) invalid("cpt_samples must be >= 1");
}

std::vector<HeatingAction> heating_actions(const HeatingContext& ctx) {
    const auto& a = pronouncer::heating::kActions;
    return {{a[0], {0.0, 0.0}},
            {a[1], {ctx.radiator_power, 0.0}},
            {a[2], {2.0 * ctx.radiator_power, 0.0}},
            {a[3], {0.0, ctx.vent_conductance}}};
}

double negotiate_setpoint(std::span<const ComfortProfile> profiles) {
    if (profiles.empty()) invalid("cannot negotiate without participants");
    double num = 0.0, den = 0.0;
    double lo = profiles.front().preferred, hi = lo;
    for (const auto& p : profiles) {
        p.validate();
        num += p.weight * p.preferred;
        den += p.weight;
        lo = std::min(lo, p.preferred);
        hi = std::max(hi, p.preferred);
    }
    // Tiny bias so that x.x5 computed as x.x4999... still rounds up.
    const double rounded = std::floor((num / den) * 10.0 + 0.5 + 1e-9) / 10.0;
    return std::clamp(rounded, lo, hi);
}

double expected_attendance(const CalendarEntry& e) {
    double sum = 0.0;
    for (const auto& a : e.attendees) sum += a.show_up_probability;
    return sum;
}

PreheatPlan plan_preheat(const CalendarEntry& e, const HeatingContext& ctx, double setpoint, double t_out_estimate,
                         Timestamp now) {
    if (e.start < now) invalid("meeting " + e.meeting + " has already started");
    const auto start = static_cast<double>(e.start);
    if (ctx.current_temp >= setpoint) return {start, 0.0, 0.0, false};

    const double available = static_cast<double>(e.start - now);
    std::optional<PreheatPlan> best;
    for (double level : {ctx.radiator_power, 2.0 * ctx.radiator_power}) {
        const auto t = thermal::time_to_target(ctx.params, ctx.current_temp, setpoint, {level, 0.0}, t_out_estimate);
        if (!t || *t > available) continue;
        const PreheatPlan candidate{start - *t, level, *t, false};
        if (!best || candidate.energy_kwh() < best->energy_kwh()) best = candidate;
    }
    if (best) return *best;
    return {static_cast<double>(now), 2.0 * ctx.radiator_power, available, true};
}

std::vector<std::vector<double>> generate_cpt(std::span<const HeatingAction> actions, const HeatingContext& ctx,
                                              std::size_t samples, std::uint64_t seed) {
    if (samples == 0) invalid("generate_cpt needs at least one sample");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> rows;
    rows.reserve(actions.size() * ctx.outside_bins.size());
    for (const auto& action : actions) {
        for (const auto& bin : ctx.outside_bins) {
            std::vector<std::size_t> counts(3, 0);  // higher, desired, lower
            for (std::size_t s = 0; s < samples; ++s) {
                const double t_out = ctx.desired_temp + bin.lo + (bin.hi - bin.lo) * unit(rng);
                const double end = thermal::analytic_temp(ctx.params, ctx.current_temp, action.input, t_out,
                                                          ctx.horizon);
                if (end > ctx.desired_temp + kDesiredBand) {
                    ++counts[0];
                } else if (end < ctx.desired_temp - kDesiredBand) {
                    ++counts[2];
                } else {
                    ++counts[1];
                }
            }
            rows.push_back(frequencies(counts, samples));
        }
    }
    return rows;
}

pronouncer::Query build_heating_query(const HeatingContext& ctx, std::string requester) {
    ctx.validate();
    namespace h = pronouncer::heating;
    const auto actions = heating_actions(ctx);
    pronouncer::Query q;
    q.template_id = h::kTemplateId;
    q.requester = std::move(requester);

    auto& prior = q.bindings[h::kPriorSlot];
    for (const auto& b : ctx.outside_bins) prior.push_back(b.prior);

    auto& cpt = q.bindings[h::kResultSlot];
    for (const auto& row : generate_cpt(actions, ctx, ctx.cpt_samples, ctx.cpt_seed)) {
        cpt.insert(cpt.end(), row.begin(), row.end());
    }

    const double penalty[3] = {ctx.penalty_higher, 0.0, ctx.penalty_lower};
    auto& utility = q.bindings[h::kUtilitySlot];
    for (const auto& a : actions) {
        const double kwh = a.input.power * ctx.horizon / thermal::kJoulesPerKwh;
        for (double p : penalty) utility.push_back(-ctx.energy_weight * kwh - p);
    }
    return q;
}

std::optional<double> renegotiate(const CalendarEntry& /*e*/, std::span<const std::string> present,
                                  std::span<const ComfortProfile> profiles) {
    std::vector<ComfortProfile> here;
    for (const auto& p : profiles) {
        if (std::find(present.begin(), present.end(), p.person) != present.end()) here.push_back(p);
    }
    if (here.empty()) return std::nullopt;
    return negotiate_setpoint(here);
}

Control apply_override(Control agent, std::span<const OverrideEvent> overrides, const std::string& room,
                       Timestamp now) {
    const OverrideEvent* winner = nullptr;
    for (const auto& o : overrides) {
        if (o.room != room || now < o.time || now >= o.expiry) continue;
        if (!winner || o.time >= winner->time) winner = &o;
    }
    if (!winner) return agent;
    Control c = agent;
    c.override_active = true;
    if (const auto* p = std::get_if<ForcedPower>(&winner->command)) {
        c.forced_power = p->watts;
    } else {
        c.forced_power.reset();
        c.setpoint = std::get<ForcedSetpoint>(winner->command).celsius;
    }
    return c;
}

}  // namespace ibsim::agents
