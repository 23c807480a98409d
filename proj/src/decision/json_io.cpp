#include "ibsim/decision/json_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

namespace ibsim::decision {

using nlohmann::json;

namespace {

void require_object(const json& j, std::string_view what, std::initializer_list<std::string_view> required,
                    std::initializer_list<std::string_view> optional = {}) {
    if (!j.is_object()) throw FormatError(std::string(what) + ": expected an object");
    for (auto k : required) {
        if (!j.contains(k)) throw FormatError(std::string(what) + ": missing key \"" + std::string(k) + "\"");
    }
    std::set<std::string_view> known(required);
    known.insert(optional.begin(), optional.end());
    for (const auto& [k, _] : j.items()) {
        if (!known.contains(k)) throw FormatError(std::string(what) + ": unknown key \"" + k + "\"");
    }
}

std::vector<std::string> string_list(const json& j, std::string_view what) {
    if (!j.is_array()) throw FormatError(std::string(what) + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw FormatError(std::string(what) + ": expected strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::vector<double> number_list(const json& j, std::string_view what) {
    if (!j.is_array()) throw FormatError(std::string(what) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) throw FormatError(std::string(what) + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::string string_field(const json& j, std::string_view key, std::string_view what) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw FormatError(std::string(what) + "." + std::string(key) + ": expected a string");
    return v.get<std::string>();
}

}  // namespace

json diagram_to_json(const InfluenceDiagram& d) {
    json j;
    j["decisions"] = json::array();
    for (const auto& dn : d.decisions) {
        json o{{"id", dn.id}, {"alternatives", dn.alternatives}};
        if (!dn.observes.empty()) o["observes"] = dn.observes;
        j["decisions"].push_back(std::move(o));
    }
    j["chances"] = json::array();
    for (const auto& cn : d.chances) {
        j["chances"].push_back(
            json{{"id", cn.id}, {"outcomes", cn.outcomes}, {"parents", cn.parents}, {"cpt", cn.cpt}});
    }
    j["utility"] = json{{"parents", d.utility.parents}, {"values", d.utility.values}};
    j["decision_order"] = d.decision_order;
    return j;
}

InfluenceDiagram diagram_from_json(const json& j) {
    require_object(j, "diagram", {"decisions", "chances", "utility", "decision_order"});
    InfluenceDiagram d;
    if (!j["decisions"].is_array()) throw FormatError("decisions: expected an array");
    for (const auto& o : j["decisions"]) {
        require_object(o, "decision", {"id", "alternatives"}, {"observes"});
        DecisionNode dn;
        dn.id = string_field(o, "id", "decision");
        dn.alternatives = string_list(o["alternatives"], "decision.alternatives");
        if (o.contains("observes")) dn.observes = string_list(o["observes"], "decision.observes");
        d.decisions.push_back(std::move(dn));
    }
    if (!j["chances"].is_array()) throw FormatError("chances: expected an array");
    for (const auto& o : j["chances"]) {
        require_object(o, "chance", {"id", "outcomes", "cpt"}, {"parents"});
        ChanceNode cn;
        cn.id = string_field(o, "id", "chance");
        cn.outcomes = string_list(o["outcomes"], "chance.outcomes");
        if (o.contains("parents")) cn.parents = string_list(o["parents"], "chance.parents");
        if (!o["cpt"].is_array()) throw FormatError("chance.cpt: expected an array of rows");
        for (const auto& row : o["cpt"]) cn.cpt.push_back(number_list(row, "chance.cpt"));
        d.chances.push_back(std::move(cn));
    }
    const auto& u = j["utility"];
    require_object(u, "utility", {"values"}, {"parents"});
    if (u.contains("parents")) d.utility.parents = string_list(u["parents"], "utility.parents");
    d.utility.values = number_list(u["values"], "utility.values");
    d.decision_order = string_list(j["decision_order"], "decision_order");
    return d;
}

namespace {

json node_to_json(const DecisionTree& t, NodeIndex i) {
    const auto& n = t.node(i);
    switch (n.kind) {
        case NodeKind::terminal:
            return json{{"utility", n.utility}};
        case NodeKind::decision: {
            json children = json::array();
            for (const auto& b : n.branches) children.push_back(json{{"action", b.label}, {"node", node_to_json(t, b.child)}});
            json o{{"decision", n.label}, {"children", std::move(children)}};
            if (!n.info_state.empty()) o["info"] = n.info_state;
            return o;
        }
        case NodeKind::chance: {
            json children = json::array();
            for (const auto& b : n.branches) {
                children.push_back(json{{"outcome", b.label}, {"p", b.probability}, {"node", node_to_json(t, b.child)}});
            }
            return json{{"chance", n.label}, {"children", std::move(children)}};
        }
    }
    return {};
}

NodeIndex node_from_json(const json& j, DecisionTree& t) {
    if (!j.is_object()) throw FormatError("tree node: expected an object");
    if (j.contains("utility")) {
        require_object(j, "terminal", {"utility"});
        if (!j["utility"].is_number()) throw FormatError("terminal.utility: expected a number");
        return t.add_terminal(j["utility"].get<double>());
    }
    if (j.contains("decision")) {
        require_object(j, "decision node", {"decision", "children"}, {"info"});
        const NodeIndex self =
            t.add_decision(string_field(j, "decision", "decision node"),
                           j.contains("info") ? string_field(j, "info", "decision node") : std::string{});
        if (!j["children"].is_array()) throw FormatError("decision node.children: expected an array");
        for (const auto& c : j["children"]) {
            require_object(c, "decision branch", {"action", "node"});
            const NodeIndex child = node_from_json(c["node"], t);
            t.add_branch(self, string_field(c, "action", "decision branch"), child);
        }
        return self;
    }
    if (j.contains("chance")) {
        require_object(j, "chance node", {"chance", "children"});
        const NodeIndex self = t.add_chance(string_field(j, "chance", "chance node"));
        if (!j["children"].is_array()) throw FormatError("chance node.children: expected an array");
        for (const auto& c : j["children"]) {
            require_object(c, "chance branch", {"outcome", "p", "node"});
            if (!c["p"].is_number()) throw FormatError("chance branch.p: expected a number");
            const NodeIndex child = node_from_json(c["node"], t);
            t.add_branch(self, string_field(c, "outcome", "chance branch"), child, c["p"].get<double>());
        }
        return self;
    }
    throw FormatError("tree node: expected one of \"utility\", \"decision\", \"chance\"");
}

}  // namespace

json tree_to_json(const DecisionTree& t) {
    if (t.empty()) return json{{"root", nullptr}};
    return json{{"root", node_to_json(t, t.root())}};
}

DecisionTree tree_from_json(const json& j) {
    require_object(j, "tree", {"root"});
    DecisionTree t;
    t.set_root(node_from_json(j["root"], t));
    return t;
}

json evaluation_to_json(const Evaluation& e) {
    json values = json::object();
    json order = json::array();
    for (const auto& [a, v] : e.action_values) {
        values[a] = v;
        order.push_back(a);
    }
    json policy = json::array();
    for (const auto& [key, action] : e.policy) {
        policy.push_back(json{{"decision", key.first}, {"info", key.second}, {"action", action}});
    }
    return json{{"best_action", e.best_action},
                {"expected_utility", e.expected_utility},
                {"action_values", values},
                {"action_order", order},
                {"policy", policy}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

InfluenceDiagram load_diagram(const std::filesystem::path& path) {
    return diagram_from_json(read_json_file(path));
}

void save_diagram(const InfluenceDiagram& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << diagram_to_json(d).dump(2) << '\n';
}

}  // namespace ibsim::decision
