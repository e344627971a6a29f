#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include <mbsched/core_model.hpp>
#include <mbsched/platform.hpp>
#include <mbsched/value_curve.hpp>

namespace mbs {

/// A configuration value is missing, malformed or out of range.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, std::string const & message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    std::string const & field() const { return field_; }

private:
    std::string field_;
};

/// Weekly arrival-intensity shape: busy weekday working hours, quieter nights,
/// quietest weekends. Normalized so its mean over a week is 1.
struct WeeklyProfile {
    bool flat = false;
    Tick day_ticks = 1440;
    Tick work_start = 540;
    Tick work_end = 1020;
    double work_weight = 2.0;
    double night_weight = 0.5;
    double weekend_weight = 0.25;
    int weekdays = 5;
    int days_per_week = 7;

    Tick week_ticks() const { return day_ticks * days_per_week; }

    /// Normalized intensity at time t (mean 1 over a week).
    double intensity(double t) const;

    /// Integral of the normalized intensity over [0, t].
    double cumulative(double t) const;

    /// Smallest t with cumulative(t) == target.
    double inverse_cumulative(double target) const;

    void validate() const;
};

struct GenConfig {
    std::size_t n_jobs = 10000;
    int tasks_min = 5;
    int tasks_max = 20;
    double exec_lo = 10.0;
    double exec_hi = 10000.0;
    int cores_lo = 1;
    int cores_hi = 100;
    std::vector<std::pair<Kind, double>> kind_mix{{Kind{1}, 0.8}, {Kind{2}, 0.2}};
    /// Rate of the exponential draw for extra in-degree.
    double degree_lambda = 1.0;
    double d_initial_lo = 2.0;
    double d_initial_hi = 4.0;
    double d_final_lo = 6.0;
    double d_final_hi = 10.0;
    int points_min = 5;
    int points_max = 10;
    /// Offered load relative to platform capacity.
    double load = 1.0;
    WeeklyProfile profile;
    double unit_price = 1.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

/// A generated or loaded workload: its generator settings plus the jobs.
struct Workload {
    GenConfig config;
    std::vector<JobSpec> jobs;
};

/// Independent generator streams derived from one seed.
enum class Stream : std::uint32_t { jobs = 1, arrivals = 2, bidding = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream);

/// One job with id 0 and arrival 0. Task cores are capped by the smallest
/// cluster of the task's kind in `platform`.
JobSpec gen_job(GenConfig const & cfg, std::mt19937_64 & rng, std::span<ClusterSpec const> platform);

ValueCurve gen_curve(GenConfig const & cfg, std::mt19937_64 & rng);

/// Total core-ticks times the unit price.
double assign_vmax(JobSpec const & job, double unit_price = 1.0);

double total_work(JobSpec const & job);

/// Sorted arrival ticks for `work.size()` jobs spread over W / (capacity * load)
/// ticks by inverse-transform sampling of the weekly profile.
std::vector<Tick> gen_arrivals(
    WeeklyProfile const & profile, std::span<double const> work, int capacity, double load, std::mt19937_64 & rng);

/// Full workload for cfg.seed at cfg.load.
Workload generate_workload(GenConfig const & cfg, std::span<ClusterSpec const> platform);

/// The same jobs with arrivals re-drawn for `load` (identical quantiles, so
/// only the span changes).
std::vector<JobSpec> with_load(Workload const & w, std::span<ClusterSpec const> platform, double load);

nlohmann::ordered_json to_json(GenConfig const & cfg);
GenConfig gen_config_from_json(nlohmann::json const & j);

nlohmann::ordered_json to_json(ValueCurve const & c);
ValueCurve curve_from_json(nlohmann::json const & j);

nlohmann::ordered_json to_json(Workload const & w);
Workload workload_from_json(nlohmann::json const & j);

std::string dump_workload(Workload const & w);
Workload load_workload_file(std::string const & path);

}  // namespace mbs
