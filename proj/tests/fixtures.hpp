#pragma once

// Shared test-only builders: the four-action heating diagram and a seeded
// generator of small random influence diagrams.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ibsim/decision/diagram.hpp"
#include "ibsim/decision/evaluate.hpp"

namespace ibsim::test {

using decision::ChanceNode;
using decision::DecisionNode;
using decision::InfluenceDiagram;

/// Heating decision with fixed, hand-picked numbers: 4 actions, 5 outside
/// bins, 3 results. Utility over (action, result).
inline InfluenceDiagram heating_diagram() {
    InfluenceDiagram d;
    d.decisions.push_back({"heat", {"no_heat", "one_radiator", "both_radiators", "ventilate"}, {}});
    d.chances.push_back({"outside",
                         {"high_pos", "pos", "near_zero", "neg", "high_neg"},
                         {},
                         {{0.05, 0.10, 0.20, 0.40, 0.25}}});
    ChanceNode result{"result", {"higher", "desired", "lower"}, {"heat", "outside"}, {}};
    // rows: heat-major, then outside bin
    const std::vector<std::vector<double>> per_action[] = {
        {{0.9, 0.1, 0.0}, {0.3, 0.5, 0.2}, {0.0, 0.3, 0.7}, {0.0, 0.1, 0.9}, {0.0, 0.0, 1.0}},  // no_heat
        {{1.0, 0.0, 0.0}, {0.6, 0.4, 0.0}, {0.1, 0.7, 0.2}, {0.0, 0.5, 0.5}, {0.0, 0.1, 0.9}},  // one
        {{1.0, 0.0, 0.0}, {0.9, 0.1, 0.0}, {0.4, 0.6, 0.0}, {0.1, 0.8, 0.1}, {0.0, 0.6, 0.4}},  // both
        {{0.4, 0.5, 0.1}, {0.1, 0.5, 0.4}, {0.0, 0.2, 0.8}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}},  // vent
    };
    for (const auto& rows : per_action) {
        for (const auto& r : rows) result.cpt.push_back(r);
    }
    d.chances.push_back(std::move(result));
    const double energy[] = {0.0, 1.0, 2.0, 0.1};
    const double penalty[] = {2.0, 0.0, 3.0};
    d.utility.parents = {"heat", "result"};
    for (double e : energy) {
        for (double p : penalty) d.utility.values.push_back(-e - p);
    }
    d.decision_order = {"heat"};
    return d;
}

struct RandomDiagramBounds {
    std::size_t max_decisions = 2;
    std::size_t max_alternatives = 4;
    std::size_t max_chances = 3;
    std::size_t max_outcomes = 4;
    std::size_t enumeration_cap = decision::kDefaultEnumerationCap;
};

inline double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline std::vector<double> random_row(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> w(n);
    const bool sparse = rng() % 4 == 0;
    double sum = 0.0;
    for (auto& x : w) {
        x = (sparse && rng() % 2 == 0) ? 0.0 : unit(rng) + 1e-3;
        sum += x;
    }
    if (sum == 0.0) {
        w[rng() % n] = 1.0;
        return w;
    }
    for (auto& x : w) x /= sum;
    return w;
}

/// Valid random diagram within `b`. The last decision may observe one chance
/// node (plus its chance ancestors) when that keeps enumeration under the cap.
inline InfluenceDiagram random_diagram(std::mt19937_64& rng, const RandomDiagramBounds& b = {}) {
    InfluenceDiagram d;
    const std::size_t n_dec = pick(rng, 1, b.max_decisions);
    const std::size_t n_ch = pick(rng, 0, b.max_chances);
    for (std::size_t k = 0; k < n_dec; ++k) {
        DecisionNode dn{"D" + std::to_string(k), {}, {}};
        const std::size_t n_alt = pick(rng, 2, b.max_alternatives);
        for (std::size_t a = 0; a < n_alt; ++a) dn.alternatives.push_back("a" + std::to_string(a));
        d.decisions.push_back(std::move(dn));
        d.decision_order.push_back(d.decisions.back().id);
    }
    for (std::size_t c = 0; c < n_ch; ++c) {
        ChanceNode cn{"X" + std::to_string(c), {}, {}, {}};
        const std::size_t n_out = pick(rng, 2, b.max_outcomes);
        for (std::size_t o = 0; o < n_out; ++o) cn.outcomes.push_back("o" + std::to_string(o));
        for (const auto& dn : d.decisions) {
            if (rng() % 2) cn.parents.push_back(dn.id);
        }
        for (std::size_t p = 0; p < c; ++p) {
            if (rng() % 3 == 0) cn.parents.push_back("X" + std::to_string(p));
        }
        const std::size_t rows = decision::joint_state_count(d, cn.parents);
        for (std::size_t r = 0; r < rows; ++r) cn.cpt.push_back(random_row(rng, n_out));
        d.chances.push_back(std::move(cn));
    }
    for (const auto& dn : d.decisions) {
        if (rng() % 4 != 0) d.utility.parents.push_back(dn.id);
    }
    for (const auto& cn : d.chances) {
        if (rng() % 3 != 0) d.utility.parents.push_back(cn.id);
    }
    if (d.utility.parents.empty()) d.utility.parents.push_back(d.decisions.front().id);
    const bool integral = rng() % 3 == 0;
    const std::size_t n_u = decision::joint_state_count(d, d.utility.parents);
    for (std::size_t i = 0; i < n_u; ++i) {
        const double u = -10.0 + 20.0 * unit(rng);
        d.utility.values.push_back(integral ? static_cast<double>(static_cast<int>(u)) : u);
    }

    // Optional observation for the last decision.
    if (n_dec > 1 && n_ch > 0 && rng() % 2 == 0) {
        const auto& last = d.decisions.back().id;
        const std::string x = "X" + std::to_string(rng() % n_ch);
        std::set<std::string> ancestors;
        std::vector<std::string> frontier{x};
        bool blocked = false;
        while (!frontier.empty()) {
            const auto id = frontier.back();
            frontier.pop_back();
            for (const auto& p : d.find_chance(id)->parents) {
                if (p == last) blocked = true;
                if (p[0] == 'X' && ancestors.insert(p).second) frontier.push_back(p);
            }
        }
        if (!blocked) {
            for (const auto& a : ancestors) {
                for (const auto& p : d.find_chance(a)->parents) {
                    if (p == last) blocked = true;
                }
            }
        }
        if (!blocked) {
            auto& obs = d.decisions.back().observes;
            obs.assign(ancestors.begin(), ancestors.end());
            obs.push_back(x);
            std::vector<std::string> all;
            for (const auto& cn : d.chances) all.push_back(cn.id);
            const auto strategies = decision::strategy_count(d);
            const auto joint = decision::joint_state_count(d, all);
            if (strategies > b.enumeration_cap / joint) obs.clear();
        }
    }
    return d;
}

}  // namespace ibsim::test
