// ibsim command-line driver. Machine-readable results go to stdout, log
// lines to stderr. Exit status: 0 success, 1 validation or input error,
// 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibsim/agents/agents.hpp"
#include "ibsim/decision/evaluate.hpp"
#include "ibsim/decision/json_io.hpp"
#include "ibsim/pronouncer/codec.hpp"
#include "ibsim/pronouncer/pronouncer.hpp"
#include "ibsim/simulator/io.hpp"
#include "ibsim/simulator/simulator.hpp"

namespace {

namespace dec = ibsim::decision;
namespace pr = ibsim::pronouncer;
namespace sim = ibsim::sim;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void log(const std::string& line) { std::cerr << "ibsim: " << line << '\n'; }

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sim::ScenarioError("cannot write " + path);
    out << text;
}

std::string metrics_text(const sim::Metrics& m, const std::string& format) {
    if (format == "csv") {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "heating_energy,comfort_deviation,advice_count,shortfalls,occupied_hours\n"
                      "%.17g,%.17g,%zu,%zu,%.17g\n",
                      m.heating_energy, m.comfort_deviation, m.advice_count, m.shortfalls, m.occupied_hours);
        return buf;
    }
    return sim::metrics_to_json(m).dump() + "\n";
}

std::string savings_text(const sim::SavingsReport& r, const std::string& format) {
    if (format == "csv") {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "agent_energy,baseline_energy,percent_saved,comfort_delta\n%.17g,%.17g,%.17g,%.17g\n",
                      r.agent_energy, r.baseline_energy, r.percent_saved, r.comfort_delta);
        return buf;
    }
    return sim::savings_to_json(r).dump() + "\n";
}

struct RunOptions {
    std::string scenario;
    std::string config;
    std::string out_trace;
    std::string out_metrics;
    std::optional<std::uint64_t> seed;
    std::string format = "json";
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--scenario", o.scenario, "scenario JSON file")->required();
    cmd->add_option("--config", o.config, "simulation config JSON file");
    cmd->add_option("--out-trace", o.out_trace, "write the trace CSV here");
    cmd->add_option("--out-metrics", o.out_metrics, "write metrics here (default: stdout)");
    cmd->add_option("--seed", o.seed, "override the scenario seed");
    cmd->add_option("--format", o.format, "metrics format")->check(CLI::IsMember({"json", "csv"}));
}

std::pair<sim::Scenario, sim::SimConfig> load_inputs(const RunOptions& o) {
    auto s = sim::load_scenario(o.scenario);
    if (o.seed) s.seed = *o.seed;
    const auto c = o.config.empty() ? sim::SimConfig{} : sim::load_config(o.config);
    return {std::move(s), c};
}

void write_outputs(const RunOptions& o, const sim::RunResult& r) {
    if (!o.out_trace.empty()) {
        std::ofstream out(o.out_trace, std::ios::binary);
        if (!out) throw sim::ScenarioError("cannot write " + o.out_trace);
        sim::write_trace_csv(out, r.trace);
    }
    write_text(o.out_metrics, metrics_text(r.metrics, o.format));
}

int cmd_simulate(const RunOptions& o) {
    const auto [s, c] = load_inputs(o);
    const auto r = sim::run(s, c);
    for (const auto& m : r.meetings) {
        std::string line = "meeting " + m.meeting + ": setpoint " + fmt("%.1f", m.setpoint);
        if (m.plan) line += ", preheat from t=" + fmt("%.0f", m.plan->start) + " s at " + fmt("%.0f", m.plan->power) + " W";
        if (!m.action.empty()) line += ", advice " + m.action;
        if (m.renegotiated_at) {
            line += m.renegotiated_setpoint ? ", renegotiated to " + fmt("%.1f", *m.renegotiated_setpoint) : ", vacated";
        }
        log(line);
    }
    log("heating energy " + fmt("%.3f", r.metrics.heating_energy) + " kWh");
    write_outputs(o, r);
    return kOk;
}

int cmd_baseline(const RunOptions& o, double setpoint) {
    const auto [s, c] = load_inputs(o);
    const auto r = sim::run_baseline(s, c, setpoint);
    log("baseline at " + fmt("%.1f", setpoint) + " degC: " + fmt("%.3f", r.metrics.heating_energy) + " kWh");
    write_outputs(o, r);
    return kOk;
}

int cmd_compare(const std::vector<std::string>& files, const RunOptions& o, double setpoint) {
    sim::Metrics agent, base;
    if (!files.empty()) {
        if (files.size() != 2) throw UsageError("compare takes exactly two metrics files: AGENT BASELINE");
        if (!o.scenario.empty()) throw UsageError("compare takes either two metrics files or --scenario");
        agent = sim::load_metrics(files[0]);
        base = sim::load_metrics(files[1]);
    } else {
        if (o.scenario.empty()) throw UsageError("compare needs two metrics files or --scenario");
        const auto [s, c] = load_inputs(o);
        agent = sim::run(s, c).metrics;
        base = sim::run_baseline(s, c, setpoint).metrics;
    }
    if (!(base.heating_energy > 0.0)) throw sim::ScenarioError("baseline used no heating energy");
    const auto r = sim::compare(agent, base);
    log("energy saved: " + fmt("%.2f", r.percent_saved) + " %");
    write_text(o.out_metrics, savings_text(r, o.format));
    return kOk;
}

int cmd_eval(const std::string& path) {
    const auto d = dec::load_diagram(path);
    if (const auto report = dec::validate_diagram(d); !report.ok()) {
        std::cerr << report.to_string();
        return kInvalid;
    }
    const auto e = dec::evaluate_diagram(d);
    std::cout << dec::evaluation_to_json(e).dump() << '\n';
    return kOk;
}

int cmd_bench(const std::string& template_id, std::size_t runs, std::size_t warmup, const std::string& bindings_path,
              const std::string& format) {
    if (runs == 0) throw UsageError("--runs must be at least 1");
    const auto p = pr::make_default_pronouncer();
    pr::Bindings bindings;
    if (!bindings_path.empty()) {
        const auto j = dec::read_json_file(bindings_path);
        pr::Query q = pr::decode_request(nlohmann::json{{"template", template_id}, {"bindings", j}}.dump());
        bindings = std::move(q.bindings);
    } else if (template_id == pr::heating::kTemplateId) {
        bindings = ibsim::agents::build_heating_query(ibsim::agents::HeatingContext{}).bindings;
    } else {
        throw UsageError("--bindings is required for template " + template_id);
    }
    const auto stats = p->benchmark(template_id, bindings, runs, warmup);
    log(std::to_string(stats.runs) + " pronounce runs on " + template_id);
    if (format == "json") {
        std::cout << nlohmann::ordered_json{{"runs", stats.runs}, {"mean_ms", stats.mean_ms}, {"stddev_ms", stats.stddev_ms}}
                         .dump()
                  << '\n';
    } else {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%zu,%.9f,%.9f\n", stats.runs, stats.mean_ms, stats.stddev_ms);
        std::cout << buf;
    }
    return kOk;
}

int cmd_validate(const std::string& scenario, const std::string& diagram) {
    if (scenario.empty() == diagram.empty()) throw UsageError("validate needs exactly one of --scenario, --diagram");
    nlohmann::ordered_json report;
    if (!diagram.empty()) {
        const auto d = dec::load_diagram(diagram);
        const auto r = dec::validate_diagram(d);
        report["ok"] = r.ok();
        report["violations"] = nlohmann::ordered_json::array();
        for (const auto& v : r.violations) {
            report["violations"].push_back({{"node", v.node}, {"rule", v.rule}, {"detail", v.detail}});
        }
    } else {
        report["ok"] = true;
        report["violations"] = nlohmann::ordered_json::array();
        try {
            (void)sim::load_scenario(scenario);
        } catch (const sim::ScenarioError& e) {
            report["ok"] = false;
            report["violations"].push_back({{"node", ""}, {"rule", "scenario"}, {"detail", e.what()}});
        }
    }
    std::cout << report.dump() << '\n';
    return report["ok"].get<bool>() ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meeting-room heating simulator with a decision-analysis pronouncer"};
    app.require_subcommand(1);

    RunOptions sim_opts, base_opts, cmp_opts;
    double base_setpoint = 22.0, cmp_setpoint = 22.0;
    auto* simulate = app.add_subcommand("simulate", "run the agent-controlled simulation");
    add_run_options(simulate, sim_opts);

    auto* baseline = app.add_subcommand("baseline", "run the constant-setpoint thermostat");
    add_run_options(baseline, base_opts);
    baseline->add_option("--setpoint", base_setpoint, "constant setpoint in degC");

    std::vector<std::string> cmp_files;
    auto* compare = app.add_subcommand("compare", "energy savings of AGENT metrics over BASELINE metrics");
    compare->add_option("files", cmp_files, "AGENT BASELINE metrics JSON files");
    compare->add_option("--scenario", cmp_opts.scenario, "run both simulations on this scenario instead");
    compare->add_option("--config", cmp_opts.config, "simulation config JSON file");
    compare->add_option("--seed", cmp_opts.seed, "override the scenario seed");
    compare->add_option("--setpoint", cmp_setpoint, "baseline setpoint in degC");
    compare->add_option("--out", cmp_opts.out_metrics, "write the report here (default: stdout)");
    compare->add_option("--format", cmp_opts.format, "report format")->check(CLI::IsMember({"json", "csv"}));

    std::string eval_diagram;
    auto* eval = app.add_subcommand("eval", "evaluate an influence diagram and print the result as JSON");
    eval->add_option("--diagram", eval_diagram, "diagram JSON file")->required();

    std::string bench_template = pr::heating::kTemplateId, bench_bindings, bench_format = "csv";
    std::size_t bench_runs = 10000, bench_warmup = 100;
    auto* bench = app.add_subcommand("bench", "time repeated pronounce calls; prints runs,mean_ms,stddev_ms");
    bench->add_option("--template", bench_template, "template id");
    bench->add_option("--runs", bench_runs, "timed runs");
    bench->add_option("--warmup", bench_warmup, "untimed runs first");
    bench->add_option("--bindings", bench_bindings, "JSON object of slot bindings");
    bench->add_option("--format", bench_format, "output format")->check(CLI::IsMember({"json", "csv"}));

    std::string val_scenario, val_diagram;
    auto* validate = app.add_subcommand("validate", "check a scenario or diagram file and print a report");
    validate->add_option("--scenario", val_scenario, "scenario JSON file");
    validate->add_option("--diagram", val_diagram, "diagram JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return kUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim_opts);
        if (*baseline) return cmd_baseline(base_opts, base_setpoint);
        if (*compare) return cmd_compare(cmp_files, cmp_opts, cmp_setpoint);
        if (*eval) return cmd_eval(eval_diagram);
        if (*bench) return cmd_bench(bench_template, bench_runs, bench_warmup, bench_bindings, bench_format);
        if (*validate) return cmd_validate(val_scenario, val_diagram);
    } catch (const UsageError& e) {
        log(e.what());
        return kUsage;
    } catch (const std::exception& e) {
        log(e.what());
        return kInvalid;
    }
    return kUsage;
}
