#include <mbsched/auctioneer.hpp>

#include <algorithm>

namespace mbs {

std::size_t ReadyQueue::erase_job(Job const & job) {
    auto first = entries_.lower_bound({job.arrive(), job.id(), 0});
    auto last = first;
    std::size_t n = 0;
    while (last != entries_.end() && last->job == job.id()) {
        ++last;
        ++n;
    }
    entries_.erase(first, last);
    return n;
}

QueueContext make_context(ReadyQueue const & queue, std::span<Job const> jobs, Tick now) {
    QueueContext ctx{now, 1};
    for (auto const & e : queue) {
        ctx.max_cp_in_queue = std::max(ctx.max_cp_in_queue, jobs[e.job].cp());
    }
    return ctx;
}

std::vector<BidEntry> collect_bids(ReadyQueue const & queue, std::span<Job const> jobs, Policy policy,
    QueueContext const & ctx, std::mt19937_64 & rng, SuccSumMode mode) {
    std::vector<BidEntry> bids;
    bids.reserve(queue.size());
    for (auto const & e : queue) {
        Job const & job = jobs[e.job];
        Task const & task = job.task(e.task);
        bids.push_back({make_bid(policy, task, job, ctx, rng, mode), &job, &task});
    }
    return bids;
}

Cluster * pick_cluster(std::span<Cluster> clusters, Task const & task) {
    Cluster * best = nullptr;
    for (auto & c : clusters) {
        if (c.can_host(task) && (best == nullptr || c.free_cores() > best->free_cores())) {
            best = &c;
        }
    }
    return best;
}

std::vector<Assignment> clear(std::vector<BidEntry> bids, Platform & platform, Tick now, ClearingMode mode) {
    // max-heap on priority: only the winners need to come off in order
    auto lower_priority = [](BidEntry const & a, BidEntry const & b) { return outranks(b.bid, a.bid); };
    std::make_heap(bids.begin(), bids.end(), lower_priority);

    std::vector<Assignment> out;
    std::vector<Kind> blocked;
    while (!bids.empty()) {
        std::pop_heap(bids.begin(), bids.end(), lower_priority);
        BidEntry const top = bids.back();
        bids.pop_back();

        Task const & task = *top.task;
        if (std::find(blocked.begin(), blocked.end(), task.kind) != blocked.end()) {
            continue;
        }
        Cluster * c = pick_cluster(platform.clusters(), task);
        if (c == nullptr) {
            if (mode == ClearingMode::global_halt) {
                break;
            }
            blocked.push_back(task.kind);
            continue;
        }
        Tick const finish = c->place(top.job->id(), task, now);
        out.push_back({top.job->id(), task.id, c->id(), now, finish, top.bid.value});
    }
    return out;
}

std::vector<JobId> DeadlineTracker::expired(Tick now) {
    std::vector<JobId> out;
    while (!heap_.empty() && heap_.top().first < static_cast<double>(now)) {
        out.push_back(heap_.top().second);
        heap_.pop();
    }
    return out;
}

std::vector<JobId> starve_sweep(Tick now, std::span<Job const> jobs, std::span<JobState> states,
    DeadlineTracker & deadlines, ReadyQueue & queue) {
    std::vector<JobId> starved;
    for (JobId j : deadlines.expired(now)) {
        if (states[j] != JobState::live) {
            continue;
        }
        states[j] = JobState::starved;
        queue.erase_job(jobs[j]);
        starved.push_back(j);
    }
    return starved;
}

}  // namespace mbs
