#pragma once

#include <optional>
#include <span>
#include <vector>

#include <mbsched/core_model.hpp>

namespace mbs {

using ClusterId = std::size_t;

struct RunningTask {
    JobId job;
    TaskId task;
    Tick start;
    Tick finish;
    int cores;
};

/// A pool of same-kind cores with an exclusive occupancy ledger.
class Cluster {
public:
    Cluster(ClusterId id, Kind kind, int total_cores);

    ClusterId id() const { return id_; }
    Kind kind() const { return kind_; }
    int total_cores() const { return total_; }
    int free_cores() const { return free_; }
    std::span<RunningTask const> running() const { return running_; }

    bool can_host(Task const & task) const { return task.kind == kind_ && task.cores <= free_; }

    /// Starts `task` now. Precondition violations are simulator bugs and abort.
    Tick place(JobId job, Task const & task, Tick now);

    /// Returns the cores held by a finished task to the pool.
    void release(JobId job, TaskId task);

private:
    ClusterId id_;
    Kind kind_;
    int total_;
    int free_;
    std::vector<RunningTask> running_;
};

struct ClusterSpec {
    Kind kind;
    int cores;
};

class Platform {
public:
    Platform(std::span<ClusterSpec const> clusters, double ccr);

    double ccr() const { return ccr_; }
    std::span<Cluster> clusters() { return clusters_; }
    std::span<Cluster const> clusters() const { return clusters_; }
    Cluster & cluster(ClusterId id) { return clusters_.at(id); }

    int total_cores() const;
    /// Largest cluster of `kind`, or nullopt if the kind is absent.
    std::optional<int> largest_cluster(Kind kind) const;
    std::optional<int> smallest_cluster(Kind kind) const;

    /// Full-scale default: 3 x Kind1 + 1 x Kind2 clusters of 1000 cores, CCR 0.2.
    static std::vector<ClusterSpec> default_layout(int cores_per_cluster = 1000);

private:
    std::vector<Cluster> clusters_;
    double ccr_;
};

/// Where and when a finished dependency's output became available.
struct DepFinish {
    Tick finish;
    Tick exec;
    ClusterId cluster;
};

/// Tick at which all inputs of a task are present on `target`.
/// With no deps this is the job's arrival.
Tick data_ready_time(std::span<DepFinish const> deps, ClusterId target, double ccr, Tick job_arrive);

/// Global queue-readiness tick: zero transfer delay only when every dep ran on
/// one cluster that could host the task; otherwise each dep pays its transfer.
Tick queue_ready_time(
    std::span<DepFinish const> deps, Kind task_kind, Platform const & platform, Tick job_arrive);

}  // namespace mbs
