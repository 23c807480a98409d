#include "ibsim/pronouncer/template.hpp"

#include <cmath>

#include "ibsim/pronouncer/pronouncer.hpp"

namespace ibsim::pronouncer {

std::vector<std::string> TemplateModel::required_bindings() const {
    std::vector<std::string> names;
    names.reserve(slots.size());
    for (const auto& s : slots) names.push_back(s.name);
    return names;
}

std::size_t TemplateModel::slot_width(const Slot& s) const {
    if (s.kind == SlotKind::utility_values) return s.count;
    const auto* cn = skeleton.find_chance(s.node);
    return cn ? s.count * cn->outcomes.size() : 0;
}

decision::InfluenceDiagram bind_template(const TemplateModel& t, const Bindings& bindings) {
    for (const auto& [name, _] : bindings) {
        bool known = false;
        for (const auto& s : t.slots) known = known || s.name == name;
        if (!known) throw PronouncerError(ErrorCode::extra_binding, "template " + t.id + " has no slot " + name);
    }
    decision::InfluenceDiagram d = t.skeleton;
    for (const auto& s : t.slots) {
        const auto it = bindings.find(s.name);
        if (it == bindings.end()) throw PronouncerError(ErrorCode::missing_binding, "missing binding " + s.name);
        const auto& v = it->second;
        if (v.size() != t.slot_width(s)) {
            throw PronouncerError(ErrorCode::bad_binding, s.name + ": expected " + std::to_string(t.slot_width(s)) +
                                                              " values, got " + std::to_string(v.size()));
        }
        for (double x : v) {
            if (!std::isfinite(x)) throw PronouncerError(ErrorCode::bad_binding, s.name + ": non-finite value");
        }
        if (s.kind == SlotKind::utility_values) {
            std::copy(v.begin(), v.end(), d.utility.values.begin() + static_cast<std::ptrdiff_t>(s.first));
            continue;
        }
        auto* cn = d.find_chance(s.node);
        const std::size_t width = cn->outcomes.size();
        for (std::size_t r = 0; r < s.count; ++r) {
            auto& row = cn->cpt[s.first + r];
            double sum = 0.0;
            for (std::size_t k = 0; k < width; ++k) {
                const double p = v[r * width + k];
                if (p < 0.0 || p > 1.0) {
                    throw PronouncerError(ErrorCode::bad_binding, s.name + ": probability out of [0, 1] in row " +
                                                                      std::to_string(r));
                }
                row[k] = p;
                sum += p;
            }
            if (!(std::abs(sum - 1.0) <= decision::kProbabilityTolerance)) {
                throw PronouncerError(ErrorCode::bad_binding, s.name + ": row " + std::to_string(r) +
                                                                  " does not sum to 1");
            }
        }
    }
    return d;
}

TemplateModel heating_template() {
    using namespace heating;
    TemplateModel t;
    t.id = kTemplateId;
    auto& d = t.skeleton;
    d.decisions.push_back({kDecision, kActions, {}});
    const std::size_t n_bins = kOutsideBins.size();
    const std::size_t n_res = kResults.size();
    const std::size_t n_act = kActions.size();
    d.chances.push_back({kOutside, kOutsideBins, {}, {std::vector<double>(n_bins, 1.0 / n_bins)}});
    d.chances.push_back({kResult, kResults, {kDecision, kOutside},
                         std::vector<std::vector<double>>(n_act * n_bins, std::vector<double>(n_res, 1.0 / n_res))});
    d.utility = {{kDecision, kResult}, std::vector<double>(n_act * n_res, 0.0)};
    d.decision_order = {kDecision};
    t.slots = {
        {kPriorSlot, SlotKind::cpt_rows, kOutside, 0, 1},
        {kResultSlot, SlotKind::cpt_rows, kResult, 0, n_act * n_bins},
        {kUtilitySlot, SlotKind::utility_values, "", 0, n_act * n_res},
    };
    return t;
}

}  // namespace ibsim::pronouncer
