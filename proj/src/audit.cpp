#include <mbsched/simulator.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace mbs {

namespace {

struct TaskTrace {
    std::optional<Tick> ready;
    std::optional<Tick> start;
    std::optional<Tick> finish;
    std::optional<ClusterId> cluster;
};

std::string where(JobId j, TaskId t) {
    return "job " + std::to_string(j) + " task " + std::to_string(t) + ": ";
}

}  // namespace

std::vector<std::string> audit_run(std::span<Job const> jobs, Platform const & platform, RunResult const & result) {
    std::vector<std::string> bad;
    auto clusters = platform.clusters();

    std::vector<std::vector<TaskTrace>> trace(jobs.size());
    for (auto const & job : jobs) {
        trace[job.id()].resize(job.tasks().size());
    }

    // (tick, phase, cluster, delta): releases (phase 0) before acquisitions (phase 1)
    std::vector<std::tuple<Tick, int, ClusterId, int>> usage;
    for (auto const & r : result.log) {
        if (!r.task) {
            continue;
        }
        auto & tt = trace.at(r.job).at(*r.task);
        Task const & task = jobs[r.job].task(*r.task);
        switch (r.type) {
        case EventType::ready:
            if (tt.ready) {
                bad.push_back(where(r.job, *r.task) + "queued twice");
            }
            tt.ready = r.tick;
            break;
        case EventType::start:
            if (tt.start) {
                bad.push_back(where(r.job, *r.task) + "started twice");
            }
            tt.start = r.tick;
            tt.cluster = r.cluster;
            usage.emplace_back(r.tick, 1, *r.cluster, task.cores);
            break;
        case EventType::finish:
            tt.finish = r.tick;
            if (tt.cluster != r.cluster) {
                bad.push_back(where(r.job, *r.task) + "finished on a different cluster");
            }
            usage.emplace_back(r.tick, 0, *r.cluster, -task.cores);
            break;
        default:
            break;
        }
    }

    std::sort(usage.begin(), usage.end());
    std::vector<int> used(clusters.size(), 0);
    for (auto const & [tick, phase, c, delta] : usage) {
        used[c] += delta;
        if (used[c] > clusters[c].total_cores() || used[c] < 0) {
            bad.push_back("cluster " + std::to_string(c) + " holds " + std::to_string(used[c]) + " cores at tick "
                + std::to_string(tick));
        }
    }

    std::vector<DepFinish> deps;
    for (auto const & job : jobs) {
        for (auto const & task : job.tasks()) {
            auto const & tt = trace[job.id()][task.id];
            if (!tt.start) {
                continue;
            }
            std::string const w = where(job.id(), task.id);
            if (clusters[*tt.cluster].kind() != task.kind) {
                bad.push_back(w + "placed on a cluster of another kind");
            }
            if (!tt.finish || *tt.finish - *tt.start != task.exec) {
                bad.push_back(w + "did not run for exactly its exec time");
            }
            if (!tt.ready || *tt.ready > *tt.start) {
                bad.push_back(w + "started before it was queued");
            }
            deps.clear();
            for (TaskId d : task.deps) {
                auto const & dt = trace[job.id()][d];
                if (!dt.finish || *dt.finish > *tt.start) {
                    bad.push_back(w + "started before dependency " + std::to_string(d) + " finished");
                    continue;
                }
                deps.push_back({*dt.finish, job.task(d).exec, *dt.cluster});
            }
            if (deps.size() == task.deps.size()) {
                Tick const need = queue_ready_time(deps, task.kind, platform, job.arrive());
                if (*tt.start < need) {
                    bad.push_back(w + "started before its input data arrived");
                }
            }
        }
    }

    if (result.outcomes.size() != jobs.size()) {
        bad.push_back("outcome count differs from job count");
        return bad;
    }
    for (auto const & o : result.outcomes) {
        Job const & job = jobs[o.job];
        std::string const w = "job " + std::to_string(o.job) + ": ";
        if (o.starved == o.finish.has_value()) {
            bad.push_back(w + "must be exactly one of completed or starved");
            continue;
        }
        if (o.starved) {
            if (o.value != 0.0) {
                bad.push_back(w + "starved job earned value");
            }
            continue;
        }
        double const slr = achieved_slr(o);
        if (!(slr >= 1.0)) {
            bad.push_back(w + "SLR below 1");
        }
        if (!(o.value >= 0.0 && o.value <= o.vmax) || o.value != value(job, slr)) {
            bad.push_back(w + "value inconsistent with its curve");
        }
        Tick last = job.arrive();
        for (auto const & tt : trace[o.job]) {
            if (!tt.finish) {
                bad.push_back(w + "completed with an unfinished task");
                break;
            }
            last = std::max(last, *tt.finish);
        }
        if (last != *o.finish) {
            bad.push_back(w + "finish tick differs from its last task");
        }
    }
    return bad;
}

}  // namespace mbs
