#include <mbsched/simulator.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace mbs {

double achieved_slr(OutcomeRecord const & r) {
    if (!r.finish) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return static_cast<double>(*r.finish - r.arrive) / static_cast<double>(r.cp);
}

std::string_view to_string(EventType e) {
    switch (e) {
    case EventType::arrive: return "arrive";
    case EventType::ready: return "ready";
    case EventType::start: return "start";
    case EventType::finish: return "finish";
    case EventType::complete: return "complete";
    case EventType::starve: return "starve";
    }
    return "?";
}

std::string format_log_record(LogRecord const & r) {
    std::string line = std::to_string(r.tick);
    line += ',';
    line += to_string(r.type);
    line += ',';
    line += std::to_string(r.job);
    line += ',';
    if (r.task) {
        line += std::to_string(*r.task);
    }
    line += ',';
    if (r.cluster) {
        line += std::to_string(*r.cluster);
    }
    line += ',';
    if (r.bid) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, *r.bid);
        line.append(buf, res.ptr);
    }
    return line;
}

std::vector<Job> build_jobs(std::span<JobSpec const> specs, double ccr) {
    std::vector<Job> jobs;
    jobs.reserve(specs.size());
    for (auto const & s : specs) {
        jobs.emplace_back(s, ccr);
    }
    return jobs;
}

void check_compatible(std::span<Job const> jobs, Platform const & platform) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto const & job = jobs[i];
        if (job.id() != i) {
            throw ModelError("job ids must be 0..n-1 in order; found " + std::to_string(job.id()) + " at position "
                + std::to_string(i));
        }
        for (auto const & t : job.tasks()) {
            auto const largest = platform.largest_cluster(t.kind);
            if (!largest) {
                throw ModelError("job " + std::to_string(job.id()) + " task " + std::to_string(t.id) + " needs kind "
                    + std::to_string(t.kind.id) + " but no cluster has that kind");
            }
            if (t.cores > *largest) {
                throw ModelError("job " + std::to_string(job.id()) + " task " + std::to_string(t.id) + " needs "
                    + std::to_string(t.cores) + " cores but the largest matching cluster has "
                    + std::to_string(*largest));
            }
        }
    }
}

namespace {

// Within a tick: finishes, then data arrivals, then job arrivals, then timers.
enum class EventKind { task_finish = 0, data_arrival = 1, job_arrival = 2, deadline_timer = 3 };

struct Event {
    Tick tick;
    EventKind kind;
    JobId job;
    TaskId task;

    auto key() const { return std::tuple(tick, static_cast<int>(kind), job, task); }
    bool operator>(Event const & o) const { return key() > o.key(); }
};

struct TaskRuntime {
    std::size_t deps_left = 0;
    bool finished = false;
    Tick finish = 0;
    ClusterId cluster = 0;
};

class Engine {
public:
    Engine(std::span<Job const> jobs, Platform platform, Policy policy, std::uint64_t seed, SimOptions const & options)
        : jobs_(jobs), platform_(std::move(platform)), policy_(policy), options_(options),
          states_(jobs.size(), JobState::pending), tasks_(jobs.size()) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 3u};
        rng_.seed(seq);
        result_.outcomes.resize(jobs.size());
        done_.assign(jobs.size(), 0);
        started_.assign(jobs.size(), 0);
        for (auto & o : result_.outcomes) {
            o.slr = std::numeric_limits<double>::quiet_NaN();
            o.value = 0.0;
        }
        for (auto const & job : jobs) {
            auto & rt = tasks_[job.id()];
            rt.resize(job.tasks().size());
            for (auto const & t : job.tasks()) {
                rt[t.id].deps_left = t.deps.size();
            }
            events_.push({job.arrive(), EventKind::job_arrival, job.id(), 0});
        }
    }

    RunResult run() {
        while (!events_.empty()) {
            Tick const now = events_.top().tick;
            while (!events_.empty() && events_.top().tick == now) {
                Event const e = events_.top();
                events_.pop();
                handle(e);
            }
            sweep(now);
            auction(now);
        }
        finalize();
        return std::move(result_);
    }

private:
    void log(Tick tick, EventType type, JobId job, std::optional<TaskId> task = {},
        std::optional<ClusterId> cluster = {}, std::optional<double> bid = {}) {
        if (options_.record_log) {
            result_.log.push_back({tick, type, job, task, cluster, bid});
        }
    }

    void handle(Event const & e) {
        switch (e.kind) {
        case EventKind::task_finish: on_task_finish(e.job, e.task, e.tick); break;
        case EventKind::data_arrival: on_data_arrival(e.job, e.task, e.tick); break;
        case EventKind::job_arrival: on_job_arrival(e.job, e.tick); break;
        case EventKind::deadline_timer: break;  // the sweep after this tick's events handles it
        }
    }

    void enqueue(Job const & job, TaskId task, Tick now) {
        queue_.push(job, task);
        log(now, EventType::ready, job.id(), task);
    }

    void on_job_arrival(JobId j, Tick now) {
        Job const & job = jobs_[j];
        states_[j] = JobState::live;
        log(now, EventType::arrive, j);
        deadlines_.add(job);
        // first tick strictly past the deadline
        Tick const timer = static_cast<Tick>(std::floor(job.deadline())) + 1;
        events_.push({timer, EventKind::deadline_timer, j, 0});
        for (auto const & t : job.tasks()) {
            if (t.deps.empty()) {
                enqueue(job, t.id, now);
            }
        }
    }

    void on_data_arrival(JobId j, TaskId t, Tick now) {
        if (states_[j] != JobState::live) {
            return;
        }
        enqueue(jobs_[j], t, now);
    }

    void on_task_finish(JobId j, TaskId t, Tick now) {
        Job const & job = jobs_[j];
        auto & rt = tasks_[j];
        rt[t].finished = true;
        platform_.cluster(rt[t].cluster).release(j, t);
        log(now, EventType::finish, j, t, rt[t].cluster);

        auto & outcome = result_.outcomes[j];
        if (++done_[j] == job.tasks().size() && states_[j] == JobState::live) {
            states_[j] = JobState::completed;
            double const slr = static_cast<double>(now - job.arrive()) / static_cast<double>(job.cp());
            if (slr < 1.0) {
                std::fprintf(stderr, "job %zu finished below its critical path\n", j);
                std::abort();
            }
            outcome.finish = now;
            outcome.slr = slr;
            outcome.value = value(job, slr);
            log(now, EventType::complete, j);
            return;
        }
        if (states_[j] != JobState::live) {
            return;
        }

        std::vector<DepFinish> deps;
        for (TaskId s : job.task(t).succs) {
            if (--rt[s].deps_left != 0) {
                continue;
            }
            deps.clear();
            for (TaskId d : job.task(s).deps) {
                deps.push_back({rt[d].finish, job.task(d).exec, rt[d].cluster});
            }
            Tick const ready = queue_ready_time(deps, job.task(s).kind, platform_, job.arrive());
            events_.push({std::max(ready, now), EventKind::data_arrival, j, s});
        }
    }

    void finalize() {
        for (auto const & job : jobs_) {
            auto & o = result_.outcomes[job.id()];
            o.job = job.id();
            o.arrive = job.arrive();
            o.vmax = job.vmax();
            o.cp = job.cp();
            o.total_work = job.total_work();
            o.tasks = job.tasks().size();
            if (o.starved) {
                o.tasks_starved = job.tasks().size() - started_[job.id()];
            }
        }
    }

    void sweep(Tick now) {
        for (JobId j : starve_sweep(now, jobs_, states_, deadlines_, queue_)) {
            auto & outcome = result_.outcomes[j];
            outcome.starved = true;
            outcome.value = 0.0;
            outcome.slr = std::numeric_limits<double>::quiet_NaN();
            log(now, EventType::starve, j);
        }
    }

    void auction(Tick now) {
        if (queue_.empty()) {
            return;
        }
        ++result_.instants;
        QueueContext const ctx = make_context(queue_, jobs_, now);
        auto bids = collect_bids(queue_, jobs_, policy_, ctx, rng_, options_.succ_sum);
        auto const assigned = options_.clearer ? options_.clearer(std::move(bids), platform_, now, options_.clearing)
                                               : clear(std::move(bids), platform_, now, options_.clearing);
        for (auto const & a : assigned) {
            Job const & job = jobs_[a.job];
            queue_.erase({job.arrive(), a.job, a.task});
            auto & rt = tasks_[a.job][a.task];
            rt.cluster = a.cluster;
            rt.finish = a.finish;
            ++started_[a.job];
            log(now, EventType::start, a.job, a.task, a.cluster, a.bid);
            events_.push({a.finish, EventKind::task_finish, a.job, a.task});
        }
    }

    std::span<Job const> jobs_;
    Platform platform_;
    Policy policy_;
    SimOptions const & options_;
    std::mt19937_64 rng_;
    std::vector<JobState> states_;
    std::vector<std::vector<TaskRuntime>> tasks_;
    std::vector<std::size_t> done_;
    std::vector<std::size_t> started_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    ReadyQueue queue_;
    DeadlineTracker deadlines_;
    RunResult result_;
};

}  // namespace

RunResult simulate(
    std::span<Job const> jobs, Platform platform, Policy policy, std::uint64_t seed, SimOptions const & options) {
    check_compatible(jobs, platform);
    Engine engine(jobs, std::move(platform), policy, seed, options);
    return engine.run();
}

}  // namespace mbs
