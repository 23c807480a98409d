#include "ibsim/decision/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ordering.hpp"

namespace ibsim::decision {

double Evaluation::value_of(std::string_view action) const {
    for (const auto& [a, v] : action_values) {
        if (a == action) return v;
    }
    throw std::out_of_range("no such action: " + std::string(action));
}

std::size_t argmax_first(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("argmax of empty set");
    const double top = *std::max_element(values.begin(), values.end());
    const double tol = 1e-12 * std::max(1.0, std::abs(top));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= top - tol) return i;
    }
    return 0;
}

namespace {

double fold(const DecisionTree& t, NodeIndex i, Policy& policy) {
    const auto& n = t.node(i);
    switch (n.kind) {
        case NodeKind::terminal:
            return n.utility;
        case NodeKind::chance: {
            double acc = 0.0;
            for (const auto& b : n.branches) acc += b.probability * fold(t, b.child, policy);
            return acc;
        }
        case NodeKind::decision: {
            std::vector<double> values;
            values.reserve(n.branches.size());
            for (const auto& b : n.branches) values.push_back(fold(t, b.child, policy));
            const auto best = argmax_first(values);
            policy[{n.label, n.info_state}] = n.branches[best].label;
            return values[best];
        }
    }
    return 0.0;
}

}  // namespace

Evaluation fold_back(const DecisionTree& t) {
    if (auto problems = t.check(); !problems.empty()) {
        std::string msg = "malformed decision tree:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw MalformedTreeError(msg);
    }
    Evaluation ev;
    const auto& root = t.node(t.root());
    if (root.kind != NodeKind::decision) {
        ev.expected_utility = fold(t, t.root(), ev.policy);
        return ev;
    }
    std::vector<double> values;
    for (const auto& b : root.branches) {
        const double v = fold(t, b.child, ev.policy);
        values.push_back(v);
        ev.action_values.emplace_back(b.label, v);
    }
    const auto best = argmax_first(values);
    ev.best_action = root.branches[best].label;
    ev.expected_utility = values[best];
    ev.policy[{root.label, root.info_state}] = ev.best_action;
    return ev;
}

Evaluation evaluate_diagram(const InfluenceDiagram& d) {
    return fold_back(compile_to_tree(d));
}

namespace {

std::size_t saturating_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
    return a * b;
}

std::size_t saturating_pow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r = saturating_mul(r, base);
    return r;
}

// Cumulative observation sets: decision k sees everything observed by
// decisions 0..k, listed batch by batch.
std::vector<std::vector<std::string>> cumulative_observations(const InfluenceDiagram& d) {
    const auto batches = detail::observation_batches(d);
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> acc;
    for (const auto& b : batches) {
        acc.insert(acc.end(), b.begin(), b.end());
        out.push_back(acc);
    }
    return out;
}

}  // namespace

std::size_t strategy_count(const InfluenceDiagram& d) {
    const auto obs = cumulative_observations(d);
    std::size_t n = 1;
    for (std::size_t k = 0; k < d.decision_order.size(); ++k) {
        const auto* dn = d.find_decision(d.decision_order[k]);
        n = saturating_mul(n, saturating_pow(dn->alternatives.size(), joint_state_count(d, obs[k])));
    }
    return n;
}

Evaluation enumerate_policies(const InfluenceDiagram& d, std::size_t cap) {
    auto report = validate_diagram(d);
    if (!report.ok()) throw DiagramError(std::move(report));

    const std::size_t n_strategies = strategy_count(d);
    std::vector<std::string> all_chances;
    for (const auto& cn : d.chances) all_chances.push_back(cn.id);
    const std::size_t n_joint = joint_state_count(d, all_chances);
    const std::size_t work = saturating_mul(n_strategies, n_joint);
    if (work > cap) {
        throw StateSpaceError("enumeration needs " + std::to_string(n_strategies) + " strategies x " +
                              std::to_string(n_joint) + " joint states, cap is " + std::to_string(cap));
    }

    // Variable layout: decisions in decision_order, then chances in
    // declaration order. Everything is addressed by integer slot.
    const std::size_t n_dec = d.decision_order.size();
    std::map<std::string, std::size_t> slot;
    std::vector<std::size_t> card;
    std::vector<const DecisionNode*> decisions;
    for (const auto& id : d.decision_order) {
        slot[id] = card.size();
        decisions.push_back(d.find_decision(id));
        card.push_back(decisions.back()->alternatives.size());
    }
    for (const auto& cn : d.chances) {
        slot[cn.id] = card.size();
        card.push_back(cn.outcomes.size());
    }
    auto slots_of = [&](const std::vector<std::string>& ids) {
        std::vector<std::size_t> s;
        for (const auto& id : ids) s.push_back(slot.at(id));
        return s;
    };
    std::vector<std::vector<std::size_t>> chance_parents;
    for (const auto& cn : d.chances) chance_parents.push_back(slots_of(cn.parents));
    const auto utility_slots = slots_of(d.utility.parents);
    const auto observations = cumulative_observations(d);
    std::vector<std::vector<std::size_t>> obs_slots;
    for (const auto& o : observations) obs_slots.push_back(slots_of(o));

    auto index_of = [&](const std::vector<std::size_t>& slots, const std::vector<std::size_t>& a) {
        std::size_t idx = 0;
        for (auto s : slots) idx = idx * card[s] + a[s];
        return idx;
    };

    // Pre-enumerate every joint chance assignment.
    std::vector<std::vector<std::size_t>> joints;
    {
        std::vector<std::size_t> a(card.size(), 0);
        for (std::size_t j = 0; j < n_joint; ++j) {
            joints.push_back(a);
            for (std::size_t c = d.chances.size(); c-- > 0;) {
                auto& digit = a[n_dec + c];
                if (++digit < card[n_dec + c]) break;
                digit = 0;
            }
        }
    }

    // A strategy is one digit per (decision, observation state). Digit 0 of
    // decision 0 is the most significant so the odometer runs
    // lexicographically.
    std::vector<std::size_t> digit_offset, digit_count;
    std::size_t n_digits = 0;
    for (std::size_t k = 0; k < n_dec; ++k) {
        digit_offset.push_back(n_digits);
        digit_count.push_back(joint_state_count(d, observations[k]));
        n_digits += digit_count.back();
    }
    std::vector<std::size_t> digit_base(n_digits);
    for (std::size_t k = 0; k < n_dec; ++k) {
        for (std::size_t i = 0; i < digit_count[k]; ++i) digit_base[digit_offset[k] + i] = card[k];
    }

    auto score = [&](const std::vector<std::size_t>& strategy) {
        double total = 0.0;
        std::vector<std::size_t> a;
        for (const auto& x : joints) {
            a = x;
            for (std::size_t k = 0; k < n_dec; ++k) {
                a[k] = strategy[digit_offset[k] + index_of(obs_slots[k], a)];
            }
            double p = 1.0;
            for (std::size_t c = 0; c < d.chances.size() && p != 0.0; ++c) {
                p *= d.chances[c].cpt[index_of(chance_parents[c], a)][a[n_dec + c]];
            }
            if (p != 0.0) total += p * d.utility.values[index_of(utility_slots, a)];
        }
        return total;
    };

    const std::size_t first_card = card[0];
    std::vector<double> best_by_action(first_card, -std::numeric_limits<double>::infinity());
    std::vector<std::vector<std::size_t>> best_strategy(first_card);

    std::vector<std::size_t> strategy(n_digits, 0);
    for (std::size_t s = 0; s < n_strategies; ++s) {
        const double v = score(strategy);
        const std::size_t first = strategy[0];
        const double incumbent = best_by_action[first];
        if (best_strategy[first].empty() ||
            v > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent))) {
            best_by_action[first] = v;
            best_strategy[first] = strategy;
        }
        for (std::size_t i = n_digits; i-- > 0;) {
            if (++strategy[i] < digit_base[i]) break;
            strategy[i] = 0;
        }
    }

    Evaluation ev;
    const auto& root = *decisions[0];
    for (std::size_t i = 0; i < first_card; ++i) ev.action_values.emplace_back(root.alternatives[i], best_by_action[i]);
    const std::size_t best = argmax_first(best_by_action);
    ev.best_action = root.alternatives[best];
    ev.expected_utility = best_by_action[best];

    // Spell the winning strategy out as a policy keyed like fold_back's:
    // the history is each earlier batch of observations followed by the
    // decision taken.
    const auto& win = best_strategy[best];
    const auto batches = detail::observation_batches(d);
    for (std::size_t k = 0; k < n_dec; ++k) {
        for (std::size_t o = 0; o < digit_count[k]; ++o) {
            std::vector<std::size_t> a(card.size(), 0);
            std::size_t rem = o;
            for (std::size_t i = obs_slots[k].size(); i-- > 0;) {
                const auto s = obs_slots[k][i];
                a[s] = rem % card[s];
                rem /= card[s];
            }
            std::string history;
            auto append = [&](const std::string& id, const std::string& label) {
                if (!history.empty()) history += ',';
                history += id + '=' + label;
            };
            for (std::size_t j = 0; j < k; ++j) {
                for (const auto& c : batches[j]) append(c, d.find_chance(c)->outcomes[a[slot.at(c)]]);
                a[j] = win[digit_offset[j] + index_of(obs_slots[j], a)];
                append(decisions[j]->id, decisions[j]->alternatives[a[j]]);
            }
            for (const auto& c : batches[k]) append(c, d.find_chance(c)->outcomes[a[slot.at(c)]]);
            ev.policy[{decisions[k]->id, history}] = decisions[k]->alternatives[win[digit_offset[k] + o]];
        }
    }
    return ev;
}

}  // namespace ibsim::decision
