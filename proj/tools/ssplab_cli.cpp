// ssplab command-line runner.
//
//   ssplab run --config <file>          execute an experiment config (JSON)
//   ssplab aggregate --dir <runs>       recompute aggregates from run CSVs
//   ssplab report --dir <runs> [--plot] print a summary (optionally render SVG)
//   ssplab oracle --scenario <name>     print exact V*, D, E[tau*]
#include "ssplab/ssplab.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace ssplab;

int cmd_run(const std::string& config_path) {
    const ExperimentConfig cfg = experiment_from_json(json::parse(read_file(config_path)));
    const auto dir = run_experiment(cfg);
    const json manifest = json::parse(read_file(dir / "manifest.json"));
    const auto& failed = manifest.at("failed");
    std::cout << "wrote " << manifest.at("files").size() << " files to " << dir.string()
              << "\n";
    if (!failed.empty()) {
        std::cout << failed.size() << " run(s) failed:\n";
        for (const auto& f : failed)
            std::cout << "  " << f.at("algorithm").get<std::string>() << " seed "
                      << f.at("seed").get<std::uint64_t>() << ": "
                      << f.at("error").get<std::string>() << "\n";
        return 1;
    }
    std::cout << report_text(dir);
    return 0;
}

int cmd_aggregate(const std::string& dir) {
    const DirectoryAggregates agg = aggregate_directory(dir, /*write_csv=*/true);
    for (const auto& [alg, a] : agg.by_algorithm)
        std::cout << alg << ": " << a.n_runs << " runs, final mean regret "
                  << fmt_num(a.mean.back()) << " (stderr " << fmt_num(a.stderr_mean.back())
                  << ")\n";
    return 0;
}

int cmd_report(const std::string& dir, bool plot) {
    std::cout << report_text(dir);
    if (plot) std::cout << "\nwrote " << write_plots(dir).string() << "\n";
    return 0;
}

int cmd_oracle(const std::string& scenario, const std::string& params_text,
               const std::string& dump_path) {
    const SspInstance inst = make_scenario(scenario, json::parse(params_text));
    const ValidationReport report = validate_instance(inst);
    const ViResult opt = best_proper_value_iteration(inst);

    std::printf("scenario:    %s\n", scenario.c_str());
    std::printf("states:      %d   actions: %d   start: s%d\n", inst.n_states, inst.n_actions,
                inst.start);
    std::printf("cost range:  [%s, %s]\n", fmt_num(inst.c_min).c_str(),
                fmt_num(inst.c_max).c_str());
    std::printf("V*(s0):      %.6f%s\n", opt.v[inst.start],
                inst.c_min > 0 ? "" : "   (best proper policy)");
    if (report.ssp_communicating)
        std::printf("D:           %.6f\n", report.ssp_diameter);
    else
        std::printf("D:           infinite (not SSP-communicating)\n");
    try {
        const ValueVector tau = expected_hitting_times(chain_of(inst, opt.policy));
        std::printf("E[tau*](s0): %.6f\n", tau[inst.start]);
    } catch (const ImproperPolicyError&) {
        std::printf("E[tau*](s0): n/a (a greedy optimal policy loops on zero costs)\n");
    }

    if (!dump_path.empty()) {
        write_file(dump_path, instance_to_json(inst).dump(2) + "\n");
        std::printf("instance written to %s\n", dump_path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ssplab: tabular stochastic-shortest-path regret laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "Execute an experiment config");
    run->add_option("--config", config_path, "experiment config JSON file")
        ->required()
        ->check(CLI::ExistingFile);

    std::string agg_dir;
    CLI::App* agg = app.add_subcommand(
        "aggregate", "Recompute per-algorithm aggregates from a run directory");
    agg->add_option("--dir", agg_dir, "run directory (contains manifest.json)")->required();

    std::string rep_dir;
    bool plot = false;
    CLI::App* rep = app.add_subcommand("report", "Summarize a run directory");
    rep->add_option("--dir", rep_dir, "run directory (contains manifest.json)")->required();
    rep->add_flag("--plot", plot, "also render regret.svg");

    std::string scenario;
    std::string params_text = "{}";
    std::string dump_path;
    CLI::App* orc =
        app.add_subcommand("oracle", "Print exact V*, D, and E[tau*] for a scenario");
    orc->add_option("--scenario", scenario, "one of: " + [] {
            std::string names;
            for (const std::string& n : ssplab::scenario_names())
                names += (names.empty() ? "" : ", ") + n;
            return names;
        }())
        ->required();
    orc->add_option("--params", params_text, "scenario parameters as inline JSON");
    orc->add_option("--dump-instance", dump_path, "write the instance JSON to this path");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(config_path);
        if (agg->parsed()) return cmd_aggregate(agg_dir);
        if (rep->parsed()) return cmd_report(rep_dir, plot);
        if (orc->parsed()) return cmd_oracle(scenario, params_text, dump_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
