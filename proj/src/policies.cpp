#include <mbsched/policies.hpp>

#include <algorithm>
#include <cmath>

namespace mbs {

namespace {

constexpr std::string_view policy_names[] = {
    "random", "fifo", "srtf", "lrtf", "pslr", "edf", "pv", "pvd", "pvdsq", "pvr"};

}  // namespace

std::string_view to_string(Policy p) {
    return policy_names[static_cast<int>(p)];
}

std::optional<Policy> parse_policy(std::string_view name) {
    for (Policy p : all_policies) {
        if (to_string(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

BidSense sense(Policy p) {
    switch (p) {
    case Policy::fifo:
    case Policy::srtf:
    case Policy::edf:
    case Policy::pvr:
        return BidSense::lowest_wins;
    default:
        return BidSense::highest_wins;
    }
}

bool outranks(Bid const & a, Bid const & b) {
    if (a.value != b.value) {
        return a.sense == BidSense::lowest_wins ? a.value < b.value : a.value > b.value;
    }
    return a.tiebreak < b.tiebreak;
}

double p_slr(Task const & task, Job const & job, QueueContext const & ctx) {
    return static_cast<double>(task.upward_rank + ctx.now - job.arrive()) / static_cast<double>(job.cp());
}

double succ_sum(Task const & task, SuccSumMode mode) {
    return mode == SuccSumMode::distinct ? task.succ_sum : task.succ_sum_recursive;
}

double bid_random(std::mt19937_64 & rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double bid_fifo(Job const & job) {
    return static_cast<double>(job.arrive());
}

double bid_srtf(Task const & task) {
    return static_cast<double>(task.upward_rank);
}

double bid_lrtf(Task const & task) {
    return static_cast<double>(task.upward_rank);
}

double bid_pslr(Task const & task, Job const & job, QueueContext const & ctx) {
    double const projected =
        static_cast<double>(task.upward_rank + ctx.now + 1 - job.arrive()) / static_cast<double>(job.cp());
    // integer floor of a non-negative ratio of ticks
    Tick const waited = ctx.now - job.arrive();
    double const periods = static_cast<double>(waited / ctx.max_cp_in_queue);
    return projected + periods * periods;
}

double bid_edf(Job const & job) {
    return job.deadline();
}

double bid_pv(Task const & task, Job const & job, QueueContext const & ctx) {
    // a short side branch can project below the critical path
    return value(job, std::max(1.0, p_slr(task, job, ctx)));
}

double bid_pvd(Task const & task, Job const & job, QueueContext const & ctx, SuccSumMode mode) {
    return bid_pv(task, job, ctx) / succ_sum(task, mode);
}

double bid_pvdsq(Task const & task, Job const & job, QueueContext const & ctx, SuccSumMode mode) {
    double const d = bid_pvd(task, job, ctx, mode);
    return d * d;
}

double bid_pvr(Task const & task, Job const & job, QueueContext const & ctx) {
    return job.curve().remaining_area(job.vmax(), p_slr(task, job, ctx));
}

Bid make_bid(Policy policy, Task const & task, Job const & job, QueueContext const & ctx, std::mt19937_64 & rng,
    SuccSumMode mode) {
    double v = 0.0;
    switch (policy) {
    case Policy::random: v = bid_random(rng); break;
    case Policy::fifo: v = bid_fifo(job); break;
    case Policy::srtf: v = bid_srtf(task); break;
    case Policy::lrtf: v = bid_lrtf(task); break;
    case Policy::pslr: v = bid_pslr(task, job, ctx); break;
    case Policy::edf: v = bid_edf(job); break;
    case Policy::pv: v = bid_pv(task, job, ctx); break;
    case Policy::pvd: v = bid_pvd(task, job, ctx, mode); break;
    case Policy::pvdsq: v = bid_pvdsq(task, job, ctx, mode); break;
    case Policy::pvr: v = bid_pvr(task, job, ctx); break;
    }
    return Bid{v, sense(policy), TieBreak{job.arrive(), job.id(), task.id}};
}

}  // namespace mbs
