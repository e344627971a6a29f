#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <mbsched/auctioneer.hpp>
#include <mbsched/core_model.hpp>
#include <mbsched/platform.hpp>
#include <mbsched/policies.hpp>

namespace mbs {

struct OutcomeRecord {
    JobId job;
    Tick arrive;
    std::optional<Tick> finish;
    bool starved = false;
    /// Achieved SLR; NaN for starved jobs.
    double slr;
    double value;
    double vmax;
    Tick cp;
    /// Total core-ticks of the job.
    double total_work;
    std::size_t tasks;
    /// Tasks of a starved job that never started.
    std::size_t tasks_starved = 0;
};

/// (finish - arrive) / cp for a completed record.
double achieved_slr(OutcomeRecord const & r);

enum class EventType { arrive, ready, start, finish, complete, starve };

std::string_view to_string(EventType e);

struct LogRecord {
    Tick tick;
    EventType type;
    JobId job;
    std::optional<TaskId> task;
    std::optional<ClusterId> cluster;
    std::optional<double> bid;

    bool operator==(LogRecord const &) const = default;
};

/// One line: tick,event,job,task,cluster,bid (empty fields where not applicable).
std::string format_log_record(LogRecord const & r);

struct SimOptions {
    ClearingMode clearing = ClearingMode::global_halt;
    SuccSumMode succ_sum = SuccSumMode::distinct;
    bool record_log = false;
    /// Replaces the built-in market clearing (used to cross-check it).
    Clearer clearer;
};

struct RunResult {
    std::vector<OutcomeRecord> outcomes;
    std::vector<LogRecord> log;
    std::size_t instants = 0;
};

/// Builds jobs from specs with the platform's CCR. Job ids must be 0..n-1.
std::vector<Job> build_jobs(std::span<JobSpec const> specs, double ccr);

/// Throws ModelError if a job uses a kind with no cluster, a task needs more
/// cores than the largest matching cluster, or job ids are not 0..n-1.
void check_compatible(std::span<Job const> jobs, Platform const & platform);

/// Runs the workload to full drain. Deterministic in (jobs, platform, policy, seed).
RunResult simulate(std::span<Job const> jobs, Platform platform, Policy policy, std::uint64_t seed,
    SimOptions const & options = {});

/// Checks a logged run against the model invariants: core capacity, kind
/// matching, dependency and data readiness, non-preemption, SLR >= 1, value
/// bounds and job conservation. Returns one message per violation.
std::vector<std::string> audit_run(std::span<Job const> jobs, Platform const & platform, RunResult const & result);

}  // namespace mbs
