#include <mbsched/core_model.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace mbs {

Tick transfer_ticks(Tick exec, double ccr) {
    // exec * ccr can land a hair above an integer (e.g. 35 * 0.2)
    double const raw = static_cast<double>(exec) * ccr;
    return static_cast<Tick>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

std::function<Tick(Task const &, Task const &)> kind_comm_cost(double ccr) {
    return [ccr](Task const & from, Task const & to) -> Tick {
        return from.kind == to.kind ? 0 : transfer_ticks(from.exec, ccr);
    };
}

namespace {

std::string find_cycle_edge(std::span<TaskSpec const> tasks, std::vector<int> const & indeg) {
    // every remaining node has a remaining predecessor; walk backwards until a repeat
    std::size_t node = 0;
    while (indeg[node] == 0) {
        ++node;
    }
    std::vector<int> seen(tasks.size(), -1);
    int step = 0;
    while (seen[node] < 0) {
        seen[node] = step++;
        for (TaskId d : tasks[node].deps) {
            if (indeg[d] > 0) {
                node = d;
                break;
            }
        }
    }
    for (TaskId d : tasks[node].deps) {
        if (indeg[d] > 0) {
            return std::to_string(d) + " -> " + std::to_string(node);
        }
    }
    return "?";
}

}  // namespace

std::vector<TaskId> topo_order(std::span<TaskSpec const> tasks) {
    std::size_t const n = tasks.size();
    std::vector<int> indeg(n, 0);
    std::vector<std::vector<TaskId>> succs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (TaskId d : tasks[i].deps) {
            if (d >= n) {
                throw ModelError("task " + std::to_string(i) + " depends on unknown task " + std::to_string(d));
            }
            succs[d].push_back(i);
            ++indeg[i];
        }
    }

    std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) {
            ready.push(i);
        }
    }

    std::vector<TaskId> order;
    order.reserve(n);
    while (!ready.empty()) {
        TaskId const t = ready.top();
        ready.pop();
        order.push_back(t);
        for (TaskId s : succs[t]) {
            if (--indeg[s] == 0) {
                ready.push(s);
            }
        }
    }

    if (order.size() != n) {
        throw ModelError("dependency cycle through edge " + find_cycle_edge(tasks, indeg));
    }
    return order;
}

std::vector<Tick> upward_ranks(
    std::span<Task const> tasks, std::function<Tick(Task const &, Task const &)> const & comm_cost) {
    std::size_t const n = tasks.size();
    std::vector<Tick> rank(n, -1);

    // iterative post-order so the result does not depend on iteration order
    auto visit = [&](TaskId root) {
        std::vector<std::pair<TaskId, std::size_t>> stack{{root, 0}};
        while (!stack.empty()) {
            auto & [t, next] = stack.back();
            auto const & succs = tasks[t].succs;
            if (next < succs.size()) {
                TaskId const s = succs[next++];
                if (rank[s] < 0) {
                    stack.emplace_back(s, 0);
                }
                continue;
            }
            Tick best = 0;
            for (TaskId s : succs) {
                best = std::max(best, comm_cost(tasks[t], tasks[s]) + rank[s]);
            }
            rank[t] = tasks[t].exec + best;
            stack.pop_back();
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (rank[i] < 0) {
            visit(i);
        }
    }
    return rank;
}

Job::Job(JobSpec spec, double ccr)
    : id_(spec.id), arrive_(spec.arrive), vmax_(spec.vmax), curve_(std::move(spec.curve)) {
    std::string const where = "job " + std::to_string(id_) + ": ";
    if (spec.tasks.empty()) {
        throw ModelError(where + "has no tasks");
    }
    if (!(vmax_ > 0.0)) {
        throw ModelError(where + "vmax must be > 0");
    }
    if (ccr < 0.0) {
        throw ModelError("ccr must be >= 0");
    }

    std::size_t const n = spec.tasks.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto const & t = spec.tasks[i];
        if (t.id != i) {
            throw ModelError(where + "task ids must be 0..n-1 in order");
        }
        if (t.exec < 1) {
            throw ModelError(where + "task " + std::to_string(i) + " exec must be >= 1");
        }
        if (t.cores < 1) {
            throw ModelError(where + "task " + std::to_string(i) + " cores must be >= 1");
        }
        for (TaskId d : t.deps) {
            if (d == i) {
                throw ModelError(where + "dependency cycle through edge " + std::to_string(i) + " -> " + std::to_string(i));
            }
        }
    }

    try {
        order_ = topo_order(spec.tasks);
    } catch (ModelError const & e) {
        throw ModelError(where + e.what());
    }

    tasks_.reserve(n);
    for (auto & t : spec.tasks) {
        auto deps = t.deps;
        std::sort(deps.begin(), deps.end());
        deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
        tasks_.push_back(Task{t.id, t.exec, t.cores, t.kind, std::move(deps), {}, 0, 0.0, 0.0});
        total_work_ += static_cast<double>(t.exec) * t.cores;
    }
    for (auto const & t : tasks_) {
        for (TaskId d : t.deps) {
            tasks_[d].succs.push_back(t.id);
        }
    }

    auto const ranks = upward_ranks(tasks_, kind_comm_cost(ccr));
    for (std::size_t i = 0; i < n; ++i) {
        tasks_[i].upward_rank = ranks[i];
        cp_ = std::max(cp_, ranks[i]);
    }

    // successor sums, walking the topological order backwards
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        auto & t = tasks_[*it];
        double const own = static_cast<double>(t.exec) * t.cores;
        t.succ_sum_recursive = own;
        reach[t.id][t.id] = true;
        for (TaskId s : t.succs) {
            t.succ_sum_recursive += tasks_[s].succ_sum_recursive;
            for (std::size_t k = 0; k < n; ++k) {
                if (reach[s][k]) {
                    reach[t.id][k] = true;
                }
            }
        }
        t.succ_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (reach[t.id][k]) {
                t.succ_sum += static_cast<double>(tasks_[k].exec) * tasks_[k].cores;
            }
        }
    }
}

Tick critical_path(Job const & job) {
    Tick best = 0;
    for (auto const & t : job.tasks()) {
        best = std::max(best, t.upward_rank);
    }
    return best;
}

double value(Job const & job, double slr) {
    return job.curve().value(job.vmax(), slr);
}

}  // namespace mbs
