#pragma once

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <mbsched/core_model.hpp>

namespace mbs {

enum class Policy { random, fifo, srtf, lrtf, pslr, edf, pv, pvd, pvdsq, pvr };

inline constexpr Policy all_policies[] = {Policy::random, Policy::fifo, Policy::srtf, Policy::lrtf, Policy::pslr,
    Policy::edf, Policy::pv, Policy::pvd, Policy::pvdsq, Policy::pvr};

std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view name);

enum class BidSense { lowest_wins, highest_wins };

BidSense sense(Policy p);

/// How PVD/PVDSQ measure the resource still required by a task.
enum class SuccSumMode { distinct, recursive };

/// Deterministic tie-break applied to every policy: earlier job, lower job id, lower task id.
struct TieBreak {
    Tick arrive;
    JobId job;
    TaskId task;

    auto operator<=>(TieBreak const &) const = default;
};

struct Bid {
    double value;
    BidSense sense;
    TieBreak tiebreak;
};

/// True when `a` has strictly higher priority than `b`.
bool outranks(Bid const & a, Bid const & b);

struct QueueContext {
    Tick now = 0;
    /// Largest critical path among jobs with at least one queued task.
    Tick max_cp_in_queue = 1;
};

/// Projected SLR if the task started right now.
double p_slr(Task const & task, Job const & job, QueueContext const & ctx);

double succ_sum(Task const & task, SuccSumMode mode = SuccSumMode::distinct);

double bid_random(std::mt19937_64 & rng);
double bid_fifo(Job const & job);
double bid_srtf(Task const & task);
double bid_lrtf(Task const & task);
double bid_pslr(Task const & task, Job const & job, QueueContext const & ctx);
double bid_edf(Job const & job);
double bid_pv(Task const & task, Job const & job, QueueContext const & ctx);
double bid_pvd(Task const & task, Job const & job, QueueContext const & ctx, SuccSumMode mode = SuccSumMode::distinct);
double bid_pvdsq(Task const & task, Job const & job, QueueContext const & ctx, SuccSumMode mode = SuccSumMode::distinct);
double bid_pvr(Task const & task, Job const & job, QueueContext const & ctx);

/// Bid of `task` under `policy`. `rng` is only consumed by Policy::random.
Bid make_bid(Policy policy, Task const & task, Job const & job, QueueContext const & ctx, std::mt19937_64 & rng,
    SuccSumMode mode = SuccSumMode::distinct);

}  // namespace mbs
