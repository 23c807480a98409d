#include "ibsim/decision/tree.hpp"

#include "ordering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ibsim::decision {

NodeIndex DecisionTree::add_terminal(double utility) {
    TreeNode n;
    n.kind = NodeKind::terminal;
    n.utility = utility;
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

NodeIndex DecisionTree::add_decision(std::string label, std::string info_state) {
    TreeNode n;
    n.kind = NodeKind::decision;
    n.label = std::move(label);
    n.info_state = std::move(info_state);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

NodeIndex DecisionTree::add_chance(std::string label) {
    TreeNode n;
    n.kind = NodeKind::chance;
    n.label = std::move(label);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

void DecisionTree::add_branch(NodeIndex parent, std::string label, NodeIndex child, double probability) {
    nodes_.at(parent).branches.push_back(Branch{std::move(label), probability, child});
}

std::size_t DecisionTree::leaf_count() const {
    if (nodes_.empty()) return 0;
    std::size_t leaves = 0;
    std::vector<NodeIndex> stack{root_};
    while (!stack.empty()) {
        const auto& n = nodes_.at(stack.back());
        stack.pop_back();
        if (n.kind == NodeKind::terminal) ++leaves;
        for (const auto& b : n.branches) stack.push_back(b.child);
    }
    return leaves;
}

std::size_t DecisionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::size_t best = 0;
    std::vector<std::pair<NodeIndex, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
        auto [i, dpt] = stack.back();
        stack.pop_back();
        best = std::max(best, dpt);
        for (const auto& b : nodes_.at(i).branches) stack.emplace_back(b.child, dpt + 1);
    }
    return best;
}

std::vector<std::string> DecisionTree::check() const {
    std::vector<std::string> problems;
    if (nodes_.empty() || root_ >= nodes_.size()) {
        problems.emplace_back("tree has no root");
        return problems;
    }
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeIndex> stack{root_};
    while (!stack.empty()) {
        const NodeIndex i = stack.back();
        stack.pop_back();
        if (seen[i]) {
            problems.push_back("node " + std::to_string(i) + " reached twice");
            continue;
        }
        seen[i] = true;
        const auto& n = nodes_[i];
        const std::string where = "node " + std::to_string(i) + " (" + n.label + ")";
        switch (n.kind) {
            case NodeKind::terminal:
                if (!n.branches.empty()) problems.push_back(where + ": terminal with children");
                if (!std::isfinite(n.utility)) problems.push_back(where + ": non-finite utility");
                break;
            case NodeKind::decision:
                if (n.branches.empty()) problems.push_back(where + ": decision without alternatives");
                break;
            case NodeKind::chance: {
                if (n.branches.empty()) {
                    problems.push_back(where + ": chance node without outcomes");
                    break;
                }
                double sum = 0.0;
                for (const auto& b : n.branches) {
                    if (!std::isfinite(b.probability) || b.probability < 0.0 || b.probability > 1.0) {
                        problems.push_back(where + ": probability out of range on " + b.label);
                    }
                    sum += b.probability;
                }
                if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
                    problems.push_back(where + ": branch probabilities sum to " + std::to_string(sum));
                }
                break;
            }
        }
        for (const auto& b : n.branches) {
            if (b.child >= nodes_.size()) {
                problems.push_back(where + ": dangling child");
            } else {
                stack.push_back(b.child);
            }
        }
    }
    return problems;
}

namespace {

struct Variable {
    bool is_decision = false;
    std::string id;
    const std::vector<std::string>* labels = nullptr;
    const ChanceNode* chance = nullptr;
    std::vector<std::size_t> parent_vars;  // chance only
};

class TreeBuilder {
public:
    explicit TreeBuilder(const InfluenceDiagram& d) : d_(d) {
        std::map<std::string, std::size_t> var_of;
        for (const auto& dn : d.decisions) {
            var_of[dn.id] = vars_.size();
            vars_.push_back({true, dn.id, &dn.alternatives, nullptr, {}});
        }
        for (const auto& cn : d.chances) {
            var_of[cn.id] = vars_.size();
            vars_.push_back({false, cn.id, &cn.outcomes, &cn, {}});
        }
        for (auto& v : vars_) {
            if (v.chance) {
                for (const auto& p : v.chance->parents) v.parent_vars.push_back(var_of.at(p));
            }
        }
        for (const auto& p : d.utility.parents) utility_vars_.push_back(var_of.at(p));

        const auto batches = detail::observation_batches(d);
        std::set<std::string> placed;
        for (std::size_t k = 0; k < d.decision_order.size(); ++k) {
            for (const auto& c : batches[k]) {
                placed.insert(c);
                sequence_.push_back(var_of.at(c));
            }
            sequence_.push_back(var_of.at(d.decision_order[k]));
        }
        for (const auto& c : detail::chance_topological_order(d)) {
            if (placed.insert(c).second) sequence_.push_back(var_of.at(c));
        }
        assignment_.assign(vars_.size(), 0);
    }

    DecisionTree build() {
        const NodeIndex root = expand(0, std::string{});
        tree_.set_root(root);
        return std::move(tree_);
    }

private:
    std::size_t mixed_radix(const std::vector<std::size_t>& var_ids) const {
        std::size_t idx = 0;
        for (auto v : var_ids) idx = idx * vars_[v].labels->size() + assignment_[v];
        return idx;
    }

    NodeIndex expand(std::size_t depth, const std::string& history) {
        if (depth == sequence_.size()) {
            return tree_.add_terminal(d_.utility.values.at(mixed_radix(utility_vars_)));
        }
        const auto& var = vars_[sequence_[depth]];
        const auto& labels = *var.labels;
        NodeIndex self = var.is_decision ? tree_.add_decision(var.id, history) : tree_.add_chance(var.id);
        const std::vector<double>* row = nullptr;
        if (!var.is_decision) row = &var.chance->cpt.at(mixed_radix(var.parent_vars));
        for (std::size_t s = 0; s < labels.size(); ++s) {
            assignment_[sequence_[depth]] = s;
            std::string next = history;
            if (!next.empty()) next += ',';
            next += var.id + '=' + labels[s];
            const NodeIndex child = expand(depth + 1, next);
            tree_.add_branch(self, labels[s], child, row ? (*row)[s] : 1.0);
        }
        return self;
    }

    const InfluenceDiagram& d_;
    std::vector<Variable> vars_;
    std::vector<std::size_t> utility_vars_;
    std::vector<std::size_t> sequence_;
    std::vector<std::size_t> assignment_;
    DecisionTree tree_;
};

}  // namespace

DecisionTree compile_to_tree(const InfluenceDiagram& d) {
    auto report = validate_diagram(d);
    if (!report.ok()) throw DiagramError(std::move(report));
    return TreeBuilder(d).build();
}

}  // namespace ibsim::decision
