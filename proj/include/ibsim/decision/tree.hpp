#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ibsim/decision/diagram.hpp"

namespace ibsim::decision {

enum class NodeKind { decision, chance, terminal };

using NodeIndex = std::size_t;

struct Branch {
    std::string label;
    double probability = 1.0;  // only meaningful under chance nodes
    NodeIndex child = 0;

    bool operator==(const Branch&) const = default;
};

/// One node of a decision tree. `label` names the decision or chance
/// variable; `info_state` is the observed history on the path to a decision
/// node, formatted as "var=label,var=label" (empty at the root).
struct TreeNode {
    NodeKind kind = NodeKind::terminal;
    std::string label;
    std::string info_state;
    double utility = 0.0;
    std::vector<Branch> branches;

    bool operator==(const TreeNode&) const = default;
};

/// Arena-backed decision tree; nodes refer to children by index.
class DecisionTree {
public:
    NodeIndex add_terminal(double utility);
    NodeIndex add_decision(std::string label, std::string info_state = {});
    NodeIndex add_chance(std::string label);
    void add_branch(NodeIndex parent, std::string label, NodeIndex child, double probability = 1.0);

    void set_root(NodeIndex root) { root_ = root; }
    [[nodiscard]] NodeIndex root() const { return root_; }
    [[nodiscard]] const TreeNode& node(NodeIndex i) const { return nodes_.at(i); }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] bool empty() const { return nodes_.empty(); }

    /// Terminals reachable from the root.
    [[nodiscard]] std::size_t leaf_count() const;
    /// Longest root-to-leaf path, counted in edges.
    [[nodiscard]] std::size_t depth() const;

    /// Empty when the tree is well formed: a root exists, every path ends at a
    /// terminal, chance rows sum to one, decision nodes have at least one
    /// branch, and every node is reached exactly once.
    [[nodiscard]] std::vector<std::string> check() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
    NodeIndex root_ = 0;
};

/// Unfolds `d` into a decision tree. Decisions appear in `decision_order`,
/// each preceded by the chance nodes it observes; the remaining chance nodes
/// follow the last decision in topological order. Throws DiagramError.
[[nodiscard]] DecisionTree compile_to_tree(const InfluenceDiagram& d);

}  // namespace ibsim::decision
