#pragma once

#include <functional>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <vector>

#include <mbsched/core_model.hpp>
#include <mbsched/platform.hpp>
#include <mbsched/policies.hpp>

namespace mbs {

/// Single global queue of ready tasks, iterated in tie-break order.
class ReadyQueue {
public:
    using Entry = TieBreak;

    bool push(Job const & job, TaskId task) { return entries_.insert({job.arrive(), job.id(), task}).second; }
    bool contains(Job const & job, TaskId task) const { return entries_.contains({job.arrive(), job.id(), task}); }
    void erase(Entry const & e) { entries_.erase(e); }
    /// Removes every queued task of `job`; returns how many were removed.
    std::size_t erase_job(Job const & job);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::set<Entry> entries_;
};

struct BidEntry {
    Bid bid;
    Job const * job;
    Task const * task;
};

struct Assignment {
    JobId job;
    TaskId task;
    ClusterId cluster;
    Tick start;
    Tick finish;
    double bid;

    bool operator==(Assignment const &) const = default;
};

enum class ClearingMode {
    /// Stop the whole auction as soon as the top bidder cannot be placed.
    global_halt,
    /// Only stop considering the blocked bidder's kind; other kinds keep clearing.
    per_kind,
};

/// Queue context at `now`: max critical path over jobs with queued tasks.
QueueContext make_context(ReadyQueue const & queue, std::span<Job const> jobs, Tick now);

/// Bids of every queued task, in queue order. Random draws are taken in that order.
std::vector<BidEntry> collect_bids(ReadyQueue const & queue, std::span<Job const> jobs, Policy policy,
    QueueContext const & ctx, std::mt19937_64 & rng, SuccSumMode mode = SuccSumMode::distinct);

/// Matching cluster with the most free cores that fits `task` (lowest id on ties).
Cluster * pick_cluster(std::span<Cluster> clusters, Task const & task);

/// Clears the market at `now`: repeatedly places the top bidder on the
/// matching cluster with most free cores. No backfilling past a blocked
/// top bidder. Placements are applied to `platform`.
std::vector<Assignment> clear(
    std::vector<BidEntry> bids, Platform & platform, Tick now, ClearingMode mode = ClearingMode::global_halt);

using Clearer = std::function<std::vector<Assignment>(std::vector<BidEntry>, Platform &, Tick, ClearingMode)>;

/// Live jobs ordered by absolute deadline.
class DeadlineTracker {
public:
    void add(Job const & job) { heap_.emplace(job.deadline(), job.id()); }

    /// Jobs whose deadline is strictly before `now`, earliest first.
    std::vector<JobId> expired(Tick now);

private:
    using Item = std::pair<double, JobId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap_;
};

enum class JobState { pending, live, completed, starved };

/// Marks every live job past its final deadline as starved and drops its
/// queued tasks. Running tasks are untouched. Returns the newly starved jobs.
std::vector<JobId> starve_sweep(Tick now, std::span<Job const> jobs, std::span<JobState> states,
    DeadlineTracker & deadlines, ReadyQueue & queue);

}  // namespace mbs
