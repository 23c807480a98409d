#pragma once

#include <string>
#include <vector>

#include "ibsim/decision/diagram.hpp"

namespace ibsim::decision::detail {

/// Chance nodes in a stable topological order (declaration order breaks
/// ties). Requires an acyclic diagram.
std::vector<std::string> chance_topological_order(const InfluenceDiagram& d);

/// For each decision in decision_order, the chance nodes that become known
/// immediately before it, in topological order. A node observed by several
/// decisions is listed at the first one only.
std::vector<std::vector<std::string>> observation_batches(const InfluenceDiagram& d);

}  // namespace ibsim::decision::detail
