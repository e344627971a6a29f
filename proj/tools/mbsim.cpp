// mbsim: generate workloads, run policy sweeps, summarize results.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mbsched/experiment.hpp>

namespace fs = std::filesystem;
using namespace mbs;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_partial = 3;

std::string workload_name(std::uint64_t seed) { return "workload_seed" + std::to_string(seed) + ".json"; }

void write_file(fs::path const & path, std::string const & text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError("--out", "cannot write " + path.string());
        }
        out << text;
    }
    fs::rename(tmp, path);
}

struct Common {
    std::string config;
    std::string out;
    std::string seeds;
};

ExperimentConfig load_config(Common const & c) {
    return c.config.empty() ? ExperimentConfig{} : load_experiment_config(c.config);
}

std::vector<std::uint64_t> seeds_of(Common const & c, ExperimentConfig const & cfg) {
    return c.seeds.empty() ? cfg.sweep.seeds : parse_seed_list(c.seeds, "--seeds");
}

Workload make_workload(ExperimentConfig const & cfg, std::uint64_t seed) {
    auto g = cfg.generator;
    g.seed = seed;
    return generate_workload(g, cfg.platform.clusters);
}

int cmd_generate(Common const & c) {
    auto const cfg = load_config(c);
    cfg.generator.validate();
    if (c.out.empty()) {
        throw ConfigError("--out", "an output directory is required");
    }
    for (auto seed : seeds_of(c, cfg)) {
        auto const path = fs::path(c.out) / workload_name(seed);
        write_file(path, dump_workload(make_workload(cfg, seed)));
        std::cerr << "wrote " << path.string() << "\n";
    }
    return exit_ok;
}

struct RunArgs {
    std::string workloads;
    std::string policies;
    std::string loads;
    unsigned jobs = 1;
    bool resume = false;
    bool event_log = false;
};

int cmd_run(Common const & c, RunArgs const & r) {
    auto cfg = load_config(c);
    if (!r.policies.empty()) {
        cfg.sweep.policies = parse_policy_list(r.policies, "--policies");
    }
    if (!r.loads.empty()) {
        cfg.sweep.loads = parse_load_list(r.loads, "--loads");
    }
    cfg.sweep.seeds = seeds_of(c, cfg);
    if (c.out.empty()) {
        throw ConfigError("--out", "an output directory is required");
    }

    std::vector<Workload> workloads;
    for (auto seed : cfg.sweep.seeds) {
        if (r.workloads.empty()) {
            workloads.push_back(make_workload(cfg, seed));
        } else {
            workloads.push_back(load_workload_file((fs::path(r.workloads) / workload_name(seed)).string()));
        }
    }

    SweepOptions opts{c.out, r.jobs, r.resume, r.event_log};
    auto const res = run_sweep(workloads, cfg, opts);
    for (auto const & f : res.failures) {
        std::cerr << "run failed: " << f << "\n";
    }
    std::cerr << res.rows.size() << " cells done, " << res.failures.size() << " failed\n";
    return res.failures.empty() ? exit_ok : exit_partial;
}

struct ReportArgs {
    std::string summary;
    std::optional<double> decile_load;
};

int cmd_report(Common const & c, ReportArgs const & r) {
    double decile_load = 1.2;
    if (!c.config.empty()) {
        decile_load = load_config(c).sweep.decile_load;
    }
    if (r.decile_load) {
        decile_load = *r.decile_load;
    }
    std::ifstream in(r.summary, std::ios::binary);
    if (!in) {
        throw ConfigError("--summary", "cannot open " + r.summary);
    }
    auto const rows = parse_summary_csv(in);
    auto const t = make_report(rows, decile_load);
    for (auto const & w : t.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    if (c.out.empty()) {
        std::cout << t.value_vs_load << "\n" << t.starvation_vs_load << "\n" << t.decile_slr;
        return exit_ok;
    }
    fs::path const out(c.out);
    write_file(out / "value_vs_load.csv", t.value_vs_load);
    write_file(out / "starvation_vs_load.csv", t.starvation_vs_load);
    write_file(out / "decile_slr.csv", t.decile_slr);
    return exit_ok;
}

}  // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Market-based DAG workflow scheduling simulator"};
    app.require_subcommand(1);

    Common common;
    RunArgs run_args;
    ReportArgs report_args;

    auto * gen = app.add_subcommand("generate", "write one workload file per seed");
    gen->add_option("--config", common.config, "experiment config (JSON)");
    gen->add_option("--out", common.out, "output directory")->required();
    gen->add_option("--seeds", common.seeds, "comma-separated seeds (default: sweep.seeds)");

    auto * run = app.add_subcommand("run", "sweep policies x loads x seeds");
    run->add_option("--config", common.config, "experiment config (JSON)");
    run->add_option("--out", common.out, "output directory")->required();
    run->add_option("--workloads", run_args.workloads, "directory of workload_seed<k>.json files");
    run->add_option("--policies", run_args.policies, "comma-separated policies");
    run->add_option("--loads", run_args.loads, "comma-separated loads");
    run->add_option("--seeds", common.seeds, "comma-separated seeds");
    run->add_option("--jobs", run_args.jobs, "parallel runs")->check(CLI::PositiveNumber);
    run->add_flag("--resume", run_args.resume, "reuse finished cells");
    run->add_flag("--event-log", run_args.event_log, "write per-run event logs");

    auto * rep = app.add_subcommand("report", "plot-ready tables from a summary CSV");
    rep->add_option("--summary", report_args.summary, "summary.csv from a run")->required();
    rep->add_option("--out", common.out, "directory for the tables (default: stdout)");
    rep->add_option("--config", common.config, "experiment config, for its decile_load");
    rep->add_option("--decile-load", report_args.decile_load, "load for the decile table");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const & e) {
        return app.exit(e);
    } catch (CLI::ParseError const & e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (gen->parsed()) {
            return cmd_generate(common);
        }
        if (run->parsed()) {
            return cmd_run(common, run_args);
        }
        return cmd_report(common, report_args);
    } catch (ConfigError const & e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (ModelError const & e) {
        std::cerr << "invalid model: " << e.what() << "\n";
        return exit_config;
    } catch (std::exception const & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
