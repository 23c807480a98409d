#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ibsim/decision/diagram.hpp"
#include "ibsim/decision/tree.hpp"

namespace ibsim::decision {

/// (decision id, information state) -> chosen action.
using Policy = std::map<std::pair<std::string, std::string>, std::string>;

/// Result of solving a decision problem. `action_values` lists the first
/// decision's alternatives in declaration order.
struct Evaluation {
    std::string best_action;
    double expected_utility = 0.0;
    std::vector<std::pair<std::string, double>> action_values;
    Policy policy;

    [[nodiscard]] double value_of(std::string_view action) const;
};

class MalformedTreeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class StateSpaceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Index of the first value within tie tolerance of the maximum. Both
/// evaluators break ties through this so they agree on near-equal values.
[[nodiscard]] std::size_t argmax_first(const std::vector<double>& values);

/// Averaging out and folding back: expectation at chance nodes, max at
/// decision nodes, lowest alternative index on ties. Throws MalformedTreeError.
[[nodiscard]] Evaluation fold_back(const DecisionTree& t);

/// fold_back(compile_to_tree(d)).
[[nodiscard]] Evaluation evaluate_diagram(const InfluenceDiagram& d);

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Exact oracle: scores every (reduced) strategy by summing probability-
/// weighted utilities over all joint chance outcomes. The work bound is
/// (#strategies x #joint chance states); exceeding `cap` throws
/// StateSpaceError.
[[nodiscard]] Evaluation enumerate_policies(const InfluenceDiagram& d,
                                            std::size_t cap = kDefaultEnumerationCap);

/// Number of strategies enumerate_policies would score; saturates at
/// SIZE_MAX.
[[nodiscard]] std::size_t strategy_count(const InfluenceDiagram& d);

}  // namespace ibsim::decision
