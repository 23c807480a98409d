#include "ibsim/decision/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ibsim::decision {

const DecisionNode* InfluenceDiagram::find_decision(std::string_view id) const {
    auto it = std::find_if(decisions.begin(), decisions.end(),
                           [&](const DecisionNode& n) { return n.id == id; });
    return it == decisions.end() ? nullptr : &*it;
}

const ChanceNode* InfluenceDiagram::find_chance(std::string_view id) const {
    auto it = std::find_if(chances.begin(), chances.end(),
                           [&](const ChanceNode& n) { return n.id == id; });
    return it == chances.end() ? nullptr : &*it;
}

ChanceNode* InfluenceDiagram::find_chance(std::string_view id) {
    auto it = std::find_if(chances.begin(), chances.end(),
                           [&](const ChanceNode& n) { return n.id == id; });
    return it == chances.end() ? nullptr : &*it;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) {
        os << v.node << ": " << v.rule;
        if (!v.detail.empty()) os << " (" << v.detail << ")";
        os << '\n';
    }
    return os.str();
}

DiagramError::DiagramError(ValidationReport report)
    : std::runtime_error("invalid influence diagram:\n" + report.to_string()),
      report_(std::move(report)) {}

std::optional<std::size_t> state_count(const InfluenceDiagram& d, std::string_view id) {
    if (const auto* dn = d.find_decision(id)) return dn->alternatives.size();
    if (const auto* cn = d.find_chance(id)) return cn->outcomes.size();
    return std::nullopt;
}

std::size_t joint_state_count(const InfluenceDiagram& d, const std::vector<std::string>& nodes) {
    std::size_t n = 1;
    for (const auto& id : nodes) n *= state_count(d, id).value_or(1);
    return n;
}

namespace {

template <typename Range>
void check_labels(const Range& labels, const std::string& node, const char* too_few,
                  const char* duplicate, const char* empty, std::vector<Violation>& out) {
    if (labels.size() < 2) out.push_back({node, too_few, std::to_string(labels.size()) + " given"});
    std::set<std::string> seen;
    for (const auto& l : labels) {
        if (l.empty()) out.push_back({node, empty, ""});
        else if (!seen.insert(l).second) out.push_back({node, duplicate, l});
    }
}

}  // namespace

ValidationReport validate_diagram(const InfluenceDiagram& d) {
    ValidationReport report;
    auto& out = report.violations;

    // Identity and label rules.
    std::set<std::string> ids;
    auto claim_id = [&](const std::string& id) {
        if (id.empty()) out.push_back({"<unnamed>", "empty-id", ""});
        else if (!ids.insert(id).second) out.push_back({id, "duplicate-id", ""});
    };
    for (const auto& dn : d.decisions) {
        claim_id(dn.id);
        check_labels(dn.alternatives, dn.id, "too-few-alternatives", "duplicate-alternative",
                     "empty-alternative", out);
    }
    for (const auto& cn : d.chances) {
        claim_id(cn.id);
        check_labels(cn.outcomes, cn.id, "too-few-outcomes", "duplicate-outcome",
                     "empty-outcome", out);
    }
    if (d.decisions.empty()) out.push_back({"<diagram>", "no-decision", ""});

    // Parent references and CPT shape.
    bool parents_resolve = true;
    for (const auto& cn : d.chances) {
        bool shape_known = true;
        for (const auto& p : cn.parents) {
            if (!state_count(d, p)) {
                out.push_back({cn.id, "unknown-parent", p});
                parents_resolve = false;
                shape_known = false;
            }
        }
        if (!shape_known) continue;
        const std::size_t rows = joint_state_count(d, cn.parents);
        if (cn.cpt.size() != rows) {
            out.push_back({cn.id, "cpt-row-count",
                           "expected " + std::to_string(rows) + ", got " + std::to_string(cn.cpt.size())});
        }
        for (std::size_t r = 0; r < cn.cpt.size(); ++r) {
            const auto& row = cn.cpt[r];
            const std::string where = "row " + std::to_string(r);
            if (row.size() != cn.outcomes.size()) {
                out.push_back({cn.id, "cpt-row-width", where});
                continue;
            }
            double sum = 0.0;
            bool in_range = true;
            for (double p : row) {
                if (!std::isfinite(p) || p < 0.0 || p > 1.0) in_range = false;
                sum += p;
            }
            if (!in_range) out.push_back({cn.id, "probability-range", where});
            if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
                std::ostringstream os;
                os.precision(17);
                os << where << " sums to " << sum;
                out.push_back({cn.id, "row-sum", os.str()});
            }
        }
    }

    // Utility table.
    for (const auto& p : d.utility.parents) {
        if (!state_count(d, p)) out.push_back({"<utility>", "unknown-parent", p});
    }
    if (std::all_of(d.utility.parents.begin(), d.utility.parents.end(),
                    [&](const std::string& p) { return state_count(d, p).has_value(); })) {
        const std::size_t n = joint_state_count(d, d.utility.parents);
        if (d.utility.values.size() != n) {
            out.push_back({"<utility>", "utility-size",
                           "expected " + std::to_string(n) + ", got " + std::to_string(d.utility.values.size())});
        }
    }
    for (std::size_t i = 0; i < d.utility.values.size(); ++i) {
        if (!std::isfinite(d.utility.values[i])) {
            out.push_back({"<utility>", "utility-non-finite", "entry " + std::to_string(i)});
        }
    }

    // decision_order must be a permutation of the decisions.
    {
        std::multiset<std::string> declared, ordered(d.decision_order.begin(), d.decision_order.end());
        for (const auto& dn : d.decisions) declared.insert(dn.id);
        if (declared != ordered) out.push_back({"<diagram>", "decision-order", "must list every decision once"});
    }

    // Observation arcs must point at chance nodes.
    bool observes_resolve = true;
    for (const auto& dn : d.decisions) {
        for (const auto& x : dn.observes) {
            if (!d.find_chance(x)) {
                out.push_back({dn.id, "observes-unknown", x});
                observes_resolve = false;
            }
        }
    }

    if (!parents_resolve || !observes_resolve) return report;

    // Acyclicity over parent arcs and observation arcs (DFS colouring).
    std::map<std::string, std::vector<std::string>> preds;
    for (const auto& cn : d.chances) preds[cn.id] = cn.parents;
    for (const auto& dn : d.decisions) preds[dn.id] = dn.observes;
    std::map<std::string, int> colour;  // 0 white, 1 grey, 2 black
    bool acyclic = true;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        colour[id] = 1;
        for (const auto& p : preds[id]) {
            if (colour[p] == 1) {
                out.push_back({id, "cycle", "through " + p});
                acyclic = false;
            } else if (colour[p] == 0) {
                visit(p);
            }
        }
        colour[id] = 2;
    };
    for (const auto& [id, _] : preds) {
        if (colour[id] == 0) visit(id);
    }
    if (!acyclic) return report;

    // Information structure: what a decision observes must be determined by
    // earlier decisions and already-observed chance nodes only.
    std::map<std::string, std::size_t> position;
    for (std::size_t k = 0; k < d.decision_order.size(); ++k) position[d.decision_order[k]] = k;
    if (position.size() != d.decisions.size()) return report;

    std::function<void(const std::string&, std::set<std::string>&)> ancestors =
        [&](const std::string& id, std::set<std::string>& acc) {
            if (const auto* cn = d.find_chance(id)) {
                for (const auto& p : cn->parents) {
                    if (acc.insert(p).second) ancestors(p, acc);
                }
            }
        };
    std::set<std::string> observed_so_far;
    for (std::size_t k = 0; k < d.decision_order.size(); ++k) {
        const auto* dn = d.find_decision(d.decision_order[k]);
        if (k == 0 && !dn->observes.empty()) {
            out.push_back({dn->id, "first-decision-observes", ""});
        }
        for (const auto& x : dn->observes) observed_so_far.insert(x);
        for (const auto& x : dn->observes) {
            std::set<std::string> acc;
            ancestors(x, acc);
            for (const auto& a : acc) {
                if (auto it = position.find(a); it != position.end()) {
                    if (it->second >= k) out.push_back({dn->id, "observes-descendant", x + " depends on " + a});
                } else if (!observed_so_far.contains(a)) {
                    out.push_back({dn->id, "observes-hidden-ancestor", x + " depends on unobserved " + a});
                }
            }
        }
    }
    return report;
}

}  // namespace ibsim::decision
