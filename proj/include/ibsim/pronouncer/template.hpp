#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ibsim/decision/diagram.hpp"
#include "ibsim/decision/evaluate.hpp"

namespace ibsim::pronouncer {

/// slot name -> flat list of numbers. A CPT slot takes its rows
/// concatenated; a utility slot takes one number per table entry.
using Bindings = std::map<std::string, std::vector<double>>;

enum class SlotKind { cpt_rows, utility_values };

/// A named hole in a template skeleton: either `count` consecutive CPT rows
/// of chance node `node` starting at `first`, or `count` consecutive utility
/// entries starting at `first`.
struct Slot {
    std::string name;
    SlotKind kind = SlotKind::cpt_rows;
    std::string node;
    std::size_t first = 0;
    std::size_t count = 0;
};

/// Problem structure designed in advance; agents only supply the numbers.
struct TemplateModel {
    std::string id;
    decision::InfluenceDiagram skeleton;
    std::vector<Slot> slots;

    [[nodiscard]] std::vector<std::string> required_bindings() const;
    /// Number of values slot `s` expects.
    [[nodiscard]] std::size_t slot_width(const Slot& s) const;
};

/// Admissibility test on one alternative of the first decision, given the
/// full set of action values. Returning false removes the action.
using ActionConstraint =
    std::function<bool(const std::string& action, const std::vector<std::pair<std::string, double>>& action_values)>;

/// Norms applied before the argmax: a static forbidden set plus optional
/// constraints over the action values.
struct NormFilter {
    std::set<std::string> forbidden;
    std::vector<ActionConstraint> constraints;

    [[nodiscard]] bool empty() const { return forbidden.empty() && constraints.empty(); }
};

/// Copies `t.skeleton` and writes `bindings` into its slots. Throws
/// PronouncerError (missing/extra/bad binding).
[[nodiscard]] decision::InfluenceDiagram bind_template(const TemplateModel& t, const Bindings& bindings);

/// Labels of the four-action heating decision.
namespace heating {
inline constexpr const char* kTemplateId = "heating";
inline constexpr const char* kDecision = "heat";
inline constexpr const char* kOutside = "outside";
inline constexpr const char* kResult = "result";
inline const std::vector<std::string> kActions{"no_heat", "one_radiator", "both_radiators", "ventilate"};
inline const std::vector<std::string> kOutsideBins{"high_pos", "pos", "near_zero", "neg", "high_neg"};
inline const std::vector<std::string> kResults{"higher", "desired", "lower"};
inline constexpr const char* kPriorSlot = "outside_prior";
inline constexpr const char* kResultSlot = "result_cpt";
inline constexpr const char* kUtilitySlot = "utility";
}  // namespace heating

/// Four actions -> final room temperature <- outside temperature (5 bins);
/// utility over (action, final temperature). Slots: outside_prior (5),
/// result_cpt (20 rows x 3, action-major), utility (4 x 3, action-major).
[[nodiscard]] TemplateModel heating_template();

}  // namespace ibsim::pronouncer
