#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <mbsched/value_curve.hpp>

namespace mbs {

using Tick = std::int64_t;
using JobId = std::size_t;
using TaskId = std::size_t;

/// Architecture label shared by tasks and clusters; they must match for a task to run.
struct Kind {
    int id = 1;

    auto operator<=>(Kind const &) const = default;
};

/// Raised when a workload or platform description is structurally invalid.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A task as described in a workload: ids are indices within the owning job.
struct TaskSpec {
    TaskId id = 0;
    Tick exec = 1;
    int cores = 1;
    Kind kind;
    std::vector<TaskId> deps;

    bool operator==(TaskSpec const &) const = default;
};

/// A job as described in a workload, before anything is derived from it.
struct JobSpec {
    JobId id = 0;
    Tick arrive = 0;
    double vmax = 1.0;
    ValueCurve curve{2.0, 6.0};
    std::vector<TaskSpec> tasks;

    bool operator==(JobSpec const &) const = default;
};

struct Task {
    TaskId id;
    Tick exec;
    int cores;
    Kind kind;
    std::vector<TaskId> deps;
    std::vector<TaskId> succs;
    Tick upward_rank = 0;
    /// exec * cores summed over this task and its distinct transitive successors.
    double succ_sum = 0.0;
    /// The same quantity using plain recursion, counting shared successors once per path.
    double succ_sum_recursive = 0.0;
};

/// Inter-cluster transfer delay for data produced by a task of duration `exec`.
Tick transfer_ticks(Tick exec, double ccr);

/// Edge delay used when estimating upward ranks before runtime: zero between
/// same-kind tasks (assumed co-located), the transfer delay otherwise.
std::function<Tick(Task const &, Task const &)> kind_comm_cost(double ccr);

/// Topological order of the tasks, ties broken by ascending task id.
/// Throws ModelError naming an edge on a cycle if the graph is cyclic.
std::vector<TaskId> topo_order(std::span<TaskSpec const> tasks);

/// Upward rank of every task: exec plus the longest (comm + rank) over successors.
std::vector<Tick> upward_ranks(
    std::span<Task const> tasks, std::function<Tick(Task const &, Task const &)> const & comm_cost);

/// A validated job with derived DAG analytics. Immutable once built.
class Job {
public:
    /// Validates the spec (exec and cores >= 1, deps in range, acyclic, vmax > 0)
    /// and derives successors, upward ranks, critical path and successor sums.
    Job(JobSpec spec, double ccr);

    JobId id() const { return id_; }
    Tick arrive() const { return arrive_; }
    double vmax() const { return vmax_; }
    ValueCurve const & curve() const { return curve_; }
    std::span<Task const> tasks() const { return tasks_; }
    Task const & task(TaskId t) const { return tasks_.at(t); }
    Tick cp() const { return cp_; }
    std::span<TaskId const> order() const { return order_; }

    /// Sum of exec * cores over all tasks.
    double total_work() const { return total_work_; }

    /// Absolute final deadline in ticks: arrive + d_final * cp.
    double deadline() const { return static_cast<double>(arrive_) + curve_.d_final() * static_cast<double>(cp_); }

private:
    JobId id_;
    Tick arrive_;
    double vmax_;
    ValueCurve curve_;
    std::vector<Task> tasks_;
    std::vector<TaskId> order_;
    Tick cp_ = 0;
    double total_work_ = 0.0;
};

/// Largest upward rank in the job.
Tick critical_path(Job const & job);

/// Value earned by `job` finishing at `slr`.
double value(Job const & job, double slr);

}  // namespace mbs
