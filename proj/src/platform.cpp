#include <mbsched/platform.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace mbs {

namespace {

[[noreturn]] void bug(char const * what) {
    std::fprintf(stderr, "simulator invariant violated: %s\n", what);
    std::abort();
}

}  // namespace

Cluster::Cluster(ClusterId id, Kind kind, int total_cores) : id_(id), kind_(kind), total_(total_cores), free_(total_cores) {
    if (total_cores < 1) {
        throw ModelError("cluster " + std::to_string(id) + " must have at least one core");
    }
}

Tick Cluster::place(JobId job, Task const & task, Tick now) {
    if (task.kind != kind_) {
        bug("task kind does not match cluster kind");
    }
    if (task.cores > free_) {
        bug("cluster has insufficient free cores");
    }
    free_ -= task.cores;
    Tick const finish = now + task.exec;
    running_.push_back({job, task.id, now, finish, task.cores});
    return finish;
}

void Cluster::release(JobId job, TaskId task) {
    auto it = std::find_if(running_.begin(), running_.end(),
        [&](RunningTask const & r) { return r.job == job && r.task == task; });
    if (it == running_.end()) {
        bug("released a task that is not running");
    }
    free_ += it->cores;
    running_.erase(it);
}

Platform::Platform(std::span<ClusterSpec const> clusters, double ccr) : ccr_(ccr) {
    if (!(ccr >= 0.0)) {
        throw ModelError("ccr must be >= 0");
    }
    if (clusters.empty()) {
        throw ModelError("platform needs at least one cluster");
    }
    for (auto const & c : clusters) {
        clusters_.emplace_back(clusters_.size(), c.kind, c.cores);
    }
}

int Platform::total_cores() const {
    return std::accumulate(clusters_.begin(), clusters_.end(), 0,
        [](int acc, Cluster const & c) { return acc + c.total_cores(); });
}

std::optional<int> Platform::largest_cluster(Kind kind) const {
    std::optional<int> best;
    for (auto const & c : clusters_) {
        if (c.kind() == kind && (!best || c.total_cores() > *best)) {
            best = c.total_cores();
        }
    }
    return best;
}

std::optional<int> Platform::smallest_cluster(Kind kind) const {
    std::optional<int> best;
    for (auto const & c : clusters_) {
        if (c.kind() == kind && (!best || c.total_cores() < *best)) {
            best = c.total_cores();
        }
    }
    return best;
}

std::vector<ClusterSpec> Platform::default_layout(int cores_per_cluster) {
    return {{Kind{1}, cores_per_cluster}, {Kind{1}, cores_per_cluster}, {Kind{1}, cores_per_cluster},
        {Kind{2}, cores_per_cluster}};
}

Tick data_ready_time(std::span<DepFinish const> deps, ClusterId target, double ccr, Tick job_arrive) {
    if (deps.empty()) {
        return job_arrive;
    }
    Tick ready = 0;
    for (auto const & d : deps) {
        Tick const delay = d.cluster == target ? 0 : transfer_ticks(d.exec, ccr);
        ready = std::max(ready, d.finish + delay);
    }
    return ready;
}

Tick queue_ready_time(
    std::span<DepFinish const> deps, Kind task_kind, Platform const & platform, Tick job_arrive) {
    if (deps.empty()) {
        return job_arrive;
    }
    ClusterId const first = deps.front().cluster;
    bool const co_located = std::all_of(deps.begin(), deps.end(),
        [&](DepFinish const & d) { return d.cluster == first; });
    if (co_located && platform.clusters()[first].kind() == task_kind) {
        return data_ready_time(deps, first, platform.ccr(), job_arrive);
    }
    // no single cluster holds everything: every dep is charged its transfer
    Tick ready = 0;
    for (auto const & d : deps) {
        ready = std::max(ready, d.finish + transfer_ticks(d.exec, platform.ccr()));
    }
    return ready;
}

}  // namespace mbs
