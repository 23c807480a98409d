// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "fixtures.hpp"
#include "ibsim/agents/agents.hpp"
#include "ibsim/decision/evaluate.hpp"
#include "ibsim/decision/json_io.hpp"
#include "ibsim/decision/tree.hpp"
#include "ibsim/pronouncer/pronouncer.hpp"
#include "ibsim/simulator/io.hpp"
#include "ibsim/simulator/simulator.hpp"
#include "ibsim/thermal/thermal.hpp"

namespace {

namespace dec = ibsim::decision;
namespace th = ibsim::thermal;
namespace ag = ibsim::agents;
namespace sim = ibsim::sim;
namespace pr = ibsim::pronouncer;

const std::string kCli = IBSIM_CLI;
const std::string kData = IBSIM_DATA_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string num(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome oracle_equivalence() {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(20240601);
    int mismatches = 0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto d = ibsim::test::random_diagram(rng);
        const auto fast = dec::evaluate_diagram(d);
        const auto slow = dec::enumerate_policies(d);
        const double gap = std::abs(fast.expected_utility - slow.expected_utility);
        worst = std::max(worst, gap);
        mismatches += fast.best_action != slow.best_action || gap > 1e-9;
    }
    const double elapsed = seconds_since(t0);
    return {mismatches == 0 && elapsed < 10.0, std::to_string(mismatches) + " mismatches, max EU gap " +
                                                   num("%.3g", worst) + ", " + num("%.2f", elapsed) + " s"};
}

Outcome heating_example() {
    const auto example = dec::load_diagram(kData + "/heating_example.json");
    pr::Bindings b;
    b[pr::heating::kPriorSlot] = example.find_chance(pr::heating::kOutside)->cpt[0];
    auto& rows = b[pr::heating::kResultSlot];
    for (const auto& r : example.find_chance(pr::heating::kResult)->cpt) rows.insert(rows.end(), r.begin(), r.end());
    b[pr::heating::kUtilitySlot] = example.utility.values;

    const auto d = pr::bind_template(pr::heating_template(), b);
    const auto tree = dec::compile_to_tree(d);
    const auto folded = dec::fold_back(tree);
    const auto oracle = dec::enumerate_policies(d);
    const auto advice = pr::make_default_pronouncer()->pronounce({pr::heating::kTemplateId, b, "acceptance"});
    const bool ok = tree.leaf_count() == 60 && folded.best_action == oracle.best_action &&
                    std::abs(folded.expected_utility - oracle.expected_utility) <= 1e-9 &&
                    advice.action == oracle.best_action;
    return {ok, std::to_string(tree.leaf_count()) + " leaves, fold-back " + folded.best_action + " (" +
                    num("%.6f", folded.expected_utility) + "), oracle " + oracle.best_action + " (" +
                    num("%.6f", oracle.expected_utility) + ")"};
}

Outcome bench() {
    const auto out = std::filesystem::temp_directory_path() / ("ibsim_bench_" + std::to_string(::getpid()) + ".csv");
    const auto t0 = clock_type::now();
    const int status = std::system((kCli + " bench --template heating --runs 10000 > " + out.string() + " 2>/dev/null").c_str());
    const double elapsed = seconds_since(t0);
    const auto text = slurp(out);
    std::filesystem::remove(out);
    unsigned long runs = 0;
    double mean = -1.0, sd = -1.0;
    const bool parsed = std::sscanf(text.c_str(), "%lu,%lf,%lf", &runs, &mean, &sd) == 3;
    const bool ok = status == 0 && parsed && runs == 10000 && mean >= 0.0 && mean <= 1.0 && sd >= 0.0 && elapsed <= 30.0;
    return {ok, "mean " + num("%.4f", mean) + " ms, stddev " + num("%.4f", sd) + " ms, total " + num("%.2f", elapsed) + " s"};
}

Outcome thermal_fidelity() {
    const th::ThermalParams room;
    double worst_traj = 0.0, worst_trip = 0.0, worst_balance = 0.0;
    for (const th::HeatInput& h : {th::HeatInput{2000.0, 0.0}, th::HeatInput{1000.0, 0.0}, th::HeatInput{0.0, 50.0}}) {
        const double tau = th::time_constant(room, h);
        const double dt = tau / 1000.0;
        th::RoomThermalState s{16.0};
        for (int i = 1; i <= 1000; ++i) {
            s = th::step(s, room, h, 10.0, dt).state;
            worst_traj = std::max(worst_traj, std::abs(s.temperature - th::analytic_temp(room, 16.0, h, 10.0, i * dt)));
        }

        const double t_inf = th::equilibrium_temp(room, h, 10.0);
        for (double frac : {0.1, 0.5, 0.9}) {
            const double target = 16.0 + frac * (t_inf - 16.0);
            const auto t = th::time_to_target(room, 16.0, target, h, 10.0);
            if (!t) return {false, "time_to_target found no solution"};
            worst_trip = std::max(worst_trip, std::abs(th::analytic_temp(room, 16.0, h, 10.0, *t) - target));
        }

        const double k = th::effective_conductance(room, h);
        const double coarse = tau / 100.0;
        th::RoomThermalState c{16.0};
        double losses = 0.0;
        // Trapezoid-rule losses, independent of the update rule.
        for (int i = 0; i < 300; ++i) {
            const double before = c.temperature;
            c = th::step(c, room, h, 10.0, coarse).state;
            losses += 0.5 * (before + c.temperature - 20.0) * k * coarse;
        }
        const double delivered = h.power * 300 * coarse;
        const double stored = room.capacitance * (c.temperature - 16.0);
        const double scale = std::max({std::abs(delivered), std::abs(stored), std::abs(losses)});
        worst_balance = std::max(worst_balance, std::abs(delivered - stored - losses) / scale);
    }
    return {worst_traj <= 0.05 && worst_trip <= 1e-6 && worst_balance <= 0.01,
            "trajectory " + num("%.4f", worst_traj) + " degC, round trip " + num("%.2g", worst_trip) +
                " degC, energy balance " + num("%.3g", 100.0 * worst_balance) + " %"};
}

Outcome energy_savings() {
    const auto s = sim::load_scenario(kData + "/default_week.json");
    const auto c = sim::load_config(kData + "/default_config.json");
    const auto agent = sim::run(s, c);
    const auto base = sim::run_baseline(s, c, 22.0);
    const auto r = sim::compare(agent.metrics, base.metrics);

    // Closed-form baseline on the same week without the manual override.
    auto plain = s;
    plain.overrides.clear();
    const double simulated = sim::run_baseline(plain, c, 22.0).metrics.heating_energy;
    const auto& room = s.rooms.front();
    double joules = room.params.capacitance * (22.0 - room.initial_temp);
    for (std::size_t i = 0; i + 1 < s.weather.size(); ++i) {
        const double mid = 0.5 * (s.weather[i].temperature + s.weather[i + 1].temperature);
        joules += (22.0 - mid) / room.params.resistance * static_cast<double>(s.weather[i + 1].time - s.weather[i].time);
    }
    const double closed = joules / th::kJoulesPerKwh;
    const bool closed_ok = std::abs(simulated - closed) <= 0.02 * closed;

    const bool ok = r.percent_saved >= 20.0 &&
                    agent.metrics.comfort_deviation <= base.metrics.comfort_deviation + 0.5 && closed_ok;
    return {ok, "saved " + num("%.2f", r.percent_saved) + " % (" + num("%.2f", agent.metrics.heating_energy) + " vs " +
                    num("%.2f", base.metrics.heating_energy) + " kWh), comfort " +
                    num("%.3f", agent.metrics.comfort_deviation) + " vs " + num("%.3f", base.metrics.comfort_deviation) +
                    " degree-hours, closed-form baseline " + num("%.2f", closed) + " kWh vs simulated " +
                    num("%.2f", simulated)};
}

sim::Scenario renegotiation_scenario(const std::vector<std::string>& shows) {
    sim::Scenario s;
    s.rooms.push_back({"meet", {}, 16.0, 1000.0, 50.0});
    s.weather = {{0, 10.0}};
    s.horizon = 86400;
    s.profiles = {{"ann", 21.0}, {"bo", 22.5}, {"cy", 20.5}, {"di", 23.0}};
    s.calendar.push_back({"m", "meet", 13 * 3600, 7200, {{"ann", 1.0}, {"bo", 1.0}, {"cy", 1.0}, {"di", 1.0}}});
    for (const auto& p : shows) s.badges.push_back({13 * 3600, p, "meet", ag::BadgeKind::enter});
    for (const auto& p : shows) s.badges.push_back({15 * 3600, p, "meet", ag::BadgeKind::leave});
    return s;
}

double setpoint_at(const sim::RunResult& r, sim::Timestamp t) {
    for (const auto& row : r.trace) {
        if (row.time == t) return row.setpoint;
    }
    return NAN;
}

Outcome renegotiation() {
    const sim::Timestamp start = 13 * 3600;
    const sim::SimConfig c;
    const std::vector<ag::ComfortProfile> all{{"ann", 21.0}, {"bo", 22.5}, {"cy", 20.5}, {"di", 23.0}};
    const std::vector<ag::ComfortProfile> subset{{"ann", 21.0}, {"di", 23.0}};
    const double planned = ag::negotiate_setpoint(all);
    const double expected = ag::negotiate_setpoint(subset);

    const auto partial = sim::run(renegotiation_scenario({"ann", "di"}), c);
    const bool partial_ok = setpoint_at(partial, start + 240) == planned && setpoint_at(partial, start + 300) == expected;
    const auto empty = sim::run(renegotiation_scenario({}), c);
    const bool empty_ok = setpoint_at(empty, start + 240) == planned && setpoint_at(empty, start + 300) == 16.0 &&
                          setpoint_at(empty, start + 7140) == 16.0;
    return {partial_ok && empty_ok, "subset: " + num("%.1f", setpoint_at(partial, start + 240)) + " -> " +
                                        num("%.1f", setpoint_at(partial, start + 300)) + " at start+300 s (expected " +
                                        num("%.1f", expected) + "); all absent: -> " +
                                        num("%.1f", setpoint_at(empty, start + 300))};
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / ("ibsim_det_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto run_once = [&](const std::string& tag) {
        const std::string cmd = kCli + " simulate --scenario " + kData + "/default_week.json --config " + kData +
                                "/default_config.json --out-trace " + (dir / (tag + ".csv")).string() +
                                " --out-metrics " + (dir / (tag + ".json")).string() + " 2>/dev/null";
        return std::system(cmd.c_str());
    };
    const int a = run_once("a"), b = run_once("b");
    const auto ta = slurp(dir / "a.csv"), tb = slurp(dir / "b.csv");
    const auto ma = slurp(dir / "a.json"), mb = slurp(dir / "b.json");
    std::filesystem::remove_all(dir);
    const bool ok = a == 0 && b == 0 && !ta.empty() && !ma.empty() && ta == tb && ma == mb;
    return {ok, "trace " + std::to_string(ta.size()) + " bytes, metrics " + std::to_string(ma.size()) + " bytes, " +
                    (ta == tb && ma == mb ? "identical" : "different")};
}

Outcome negotiation_properties() {
    std::mt19937_64 rng(31337);
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<ag::ComfortProfile> ps(1 + rng() % 10);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            ps[i] = {"p" + std::to_string(i), 15.0 + 15.0 * ibsim::test::unit(rng), 0.05 + 10.0 * ibsim::test::unit(rng)};
        }
        const double t = ag::negotiate_setpoint(ps);
        double lo = ps[0].preferred, hi = lo;
        for (const auto& p : ps) {
            lo = std::min(lo, p.preferred);
            hi = std::max(hi, p.preferred);
        }
        failures += !(t >= lo && t <= hi);

        auto scaled = ps;
        const double k = std::exp(-5.0 + 10.0 * ibsim::test::unit(rng));
        for (auto& p : scaled) p.weight *= k;
        failures += ag::negotiate_setpoint(scaled) != t;

        auto same = ps;
        for (auto& p : same) p.preferred = ps[0].preferred;
        failures += ag::negotiate_setpoint(same) != ps[0].preferred;
    }
    return {failures == 0, std::to_string(failures) + " violations over 1000 sets"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"oracle equivalence on 200 random diagrams", oracle_equivalence},
        {"heating example: 60-leaf tree, fold-back equals oracle", heating_example},
        {"bench --runs 10000: mean <= 1 ms, total <= 30 s", bench},
        {"thermal fidelity", thermal_fidelity},
        {"energy savings on the default week", energy_savings},
        {"renegotiation at start + 300 s", renegotiation},
        {"simulate determinism", determinism},
        {"negotiation properties over 1000 sets", negotiation_properties},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
