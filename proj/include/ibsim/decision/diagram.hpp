#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ibsim::decision {

/// Probability rows must sum to one within this tolerance. Rows outside it are
/// rejected, never renormalized.
inline constexpr double kProbabilityTolerance = 1e-9;

struct DecisionNode {
    std::string id;
    std::vector<std::string> alternatives;
    /// Chance nodes whose outcome is known when this decision is taken.
    std::vector<std::string> observes;

    bool operator==(const DecisionNode&) const = default;
};

/// Discrete chance node. `cpt` holds one row per joint parent assignment,
/// enumerated in mixed radix with the first parent as the most significant
/// digit. A parentless node has exactly one row.
struct ChanceNode {
    std::string id;
    std::vector<std::string> outcomes;
    std::vector<std::string> parents;
    std::vector<std::vector<double>> cpt;

    bool operator==(const ChanceNode&) const = default;
};

/// Utility as a table over its parents, same mixed-radix layout as a CPT.
struct UtilityTable {
    std::vector<std::string> parents;
    std::vector<double> values;

    bool operator==(const UtilityTable&) const = default;
};

struct InfluenceDiagram {
    std::vector<DecisionNode> decisions;
    std::vector<ChanceNode> chances;
    UtilityTable utility;
    std::vector<std::string> decision_order;

    bool operator==(const InfluenceDiagram&) const = default;

    [[nodiscard]] const DecisionNode* find_decision(std::string_view id) const;
    [[nodiscard]] const ChanceNode* find_chance(std::string_view id) const;
    [[nodiscard]] ChanceNode* find_chance(std::string_view id);
};

struct Violation {
    std::string node;
    std::string rule;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
    [[nodiscard]] std::string to_string() const;
};

/// Thrown by operations that require a valid diagram.
class DiagramError : public std::runtime_error {
public:
    explicit DiagramError(ValidationReport report);
    [[nodiscard]] const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

/// Checks every structural and numerical invariant of `d`. Never throws.
///
/// Rules reported (the `rule` field):
///   duplicate-id, empty-id, too-few-alternatives, duplicate-alternative,
///   empty-alternative, too-few-outcomes, duplicate-outcome, unknown-parent,
///   cycle, cpt-row-count, cpt-row-width, probability-range, row-sum,
///   utility-size, utility-non-finite, decision-order, no-decision,
///   observes-unknown, observes-descendant, observes-hidden-ancestor,
///   first-decision-observes.
[[nodiscard]] ValidationReport validate_diagram(const InfluenceDiagram& d);

/// Number of joint assignments of the given nodes (product of their state
/// counts). Unknown ids count as one state.
[[nodiscard]] std::size_t joint_state_count(const InfluenceDiagram& d,
                                            const std::vector<std::string>& nodes);

/// State count of a decision or chance node, nullopt if the id is unknown.
[[nodiscard]] std::optional<std::size_t> state_count(const InfluenceDiagram& d, std::string_view id);

}  // namespace ibsim::decision
