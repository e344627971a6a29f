#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <mbsched/auctioneer.hpp>
#include <mbsched/metrics.hpp>
#include <mbsched/platform.hpp>
#include <mbsched/policies.hpp>
#include <mbsched/simulator.hpp>
#include <mbsched/workload.hpp>

namespace mbs {

struct PlatformConfig {
    std::vector<ClusterSpec> clusters = Platform::default_layout();
    double ccr = 0.2;

    Platform build() const { return Platform(clusters, ccr); }
};

struct SweepConfig {
    std::vector<Policy> policies{std::begin(all_policies), std::end(all_policies)};
    std::vector<double> loads{0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    double decile_load = 1.2;
    ClearingMode clearing = ClearingMode::global_halt;
    SuccSumMode succ_sum = SuccSumMode::distinct;
    DecileKey decile_key = DecileKey::total_work;
};

struct OutputConfig {
    bool event_log = false;
};

/// Everything needed to reproduce a sweep. Sections: generator, platform, sweep, output.
struct ExperimentConfig {
    GenConfig generator;
    PlatformConfig platform;
    SweepConfig sweep;
    OutputConfig output;
};

ExperimentConfig experiment_config_from_json(nlohmann::json const & j);
nlohmann::ordered_json to_json(ExperimentConfig const & cfg);
ExperimentConfig load_experiment_config(std::filesystem::path const & path);

/// Comma-separated list parsing for CLI overrides; throws ConfigError naming `field`.
std::vector<Policy> parse_policy_list(std::string const & csv, std::string const & field);
std::vector<double> parse_load_list(std::string const & csv, std::string const & field);
std::vector<std::uint64_t> parse_seed_list(std::string const & csv, std::string const & field);

/// Shortest round-trip decimal form.
std::string format_number(double v);

struct SummaryRow {
    Policy policy;
    double load;
    std::uint64_t seed;
    double normalized_value;
    std::size_t starved_count;
    double starved_fraction;
    std::array<double, 10> decile_slr;
    std::size_t starved_tasks;
    double starved_task_fraction;
};

SummaryRow summarize(Policy policy, double load, std::uint64_t seed, std::span<OutcomeRecord const> outcomes,
    DecileKey key = DecileKey::total_work);

std::string summary_csv_header();
std::string format_summary_row(SummaryRow const & r);
std::vector<SummaryRow> parse_summary_csv(std::istream & in);

std::string outcomes_csv(std::span<OutcomeRecord const> outcomes);

struct CellRun {
    SummaryRow row;
    RunResult run;
};

/// One (workload, policy, load) simulation.
CellRun run_cell(Workload const & workload, ExperimentConfig const & cfg, Policy policy, double load,
    bool record_log = false);

struct SweepOptions {
    std::filesystem::path out_dir;
    unsigned jobs = 1;
    bool resume = false;
    bool event_log = false;
};

struct SweepResult {
    std::vector<SummaryRow> rows;
    std::vector<std::string> failures;
};

/// Runs every (workload, policy, load) cell, writing per-cell artifacts
/// atomically under out_dir/runs/<policy>/load_<x>/seed_<s>/, then
/// summary.csv and manifest.json. With `resume`, finished cells are reused.
SweepResult run_sweep(std::vector<Workload> const & workloads, ExperimentConfig const & cfg,
    SweepOptions const & options);

struct ReportTables {
    std::string value_vs_load;
    std::string starvation_vs_load;
    std::string decile_slr;
    std::vector<std::string> warnings;
};

/// Plot-ready tables: value and starvation against load (mean and sample
/// stddev over seeds), and mean decile SLR per policy at `decile_load`.
ReportTables make_report(std::span<SummaryRow const> rows, double decile_load);

/// Stable 64-bit FNV-1a digest, used to fingerprint configs in manifests.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace mbs
