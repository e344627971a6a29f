#include <doctest.h>

#include <cmath>
#include <map>

#include <mbsched/simulator.hpp>
#include <mbsched/workload.hpp>

#include "test_util.hpp"

using namespace mbs;
using mbs::test::job_spec;

namespace {

std::vector<ClusterSpec> one_cluster(int cores = 100) { return {{Kind{1}, cores}}; }

RunResult run(std::vector<Job> const & jobs, std::vector<ClusterSpec> const & layout, Policy p = Policy::fifo,
    SimOptions opts = {}) {
    opts.record_log = true;
    Platform platform(layout, 0.2);
    return simulate(jobs, platform, p, 1, opts);
}

std::vector<Job> small_workload(std::uint64_t seed, std::size_t n) {
    GenConfig cfg;
    cfg.n_jobs = n;
    cfg.cores_hi = 30;
    cfg.exec_lo = 10;
    cfg.exec_hi = 300;
    cfg.seed = seed;
    cfg.load = 1.2;
    auto const w = generate_workload(cfg, Platform::default_layout(100));
    return build_jobs(w.jobs, 0.2);
}

}  // namespace

TEST_CASE("empty workload") {
    auto const r = run({}, one_cluster());
    CHECK(r.outcomes.empty());
    CHECK(r.log.empty());
}

TEST_CASE("single task on an idle platform") {
    std::vector<Job> jobs{Job(job_spec({{10}}), 0.2)};
    auto const r = run(jobs, one_cluster());
    REQUIRE(r.outcomes.size() == 1);
    auto const & o = r.outcomes[0];
    CHECK(o.finish == 10);
    CHECK_FALSE(o.starved);
    CHECK(o.slr == 1.0);
    CHECK(o.value == 100.0);
    CHECK(audit_run(jobs, Platform(one_cluster(), 0.2), r).empty());
}

TEST_CASE("contention delays the second job") {
    std::vector<Job> jobs{Job(job_spec({{10, 80}}, 0, 100.0, ValueCurve(2.0, 6.0), 0), 0.2),
        Job(job_spec({{10, 50}}, 1, 100.0, ValueCurve(2.0, 6.0), 1), 0.2)};
    auto const r = run(jobs, one_cluster());
    CHECK(r.outcomes[0].finish == 10);
    CHECK(r.outcomes[1].finish == 20);
    CHECK(r.outcomes[1].slr == doctest::Approx(1.9));
    CHECK(r.outcomes[1].slr > 1.0);
}

TEST_CASE("achieved_slr") {
    OutcomeRecord r{};
    r.arrive = 0;
    r.finish = 10;
    r.cp = 10;
    CHECK(achieved_slr(r) == 1.0);
    r.arrive = 5;
    r.finish = 25;
    CHECK(achieved_slr(r) == 2.0);
}

TEST_CASE("transfer delay between clusters") {
    // Kind1 then Kind2: the successor must move, 2 ticks for exec 10
    std::vector<Job> jobs{Job(job_spec({{10, 1, 1}, {20, 1, 2, {0}}}), 0.2)};
    std::vector<ClusterSpec> const layout{{Kind{1}, 10}, {Kind{2}, 10}};
    auto const r = run(jobs, layout);
    CHECK(r.outcomes[0].finish == 32);
    CHECK(r.outcomes[0].slr == 1.0);

    // same kind and a single cluster: no delay
    std::vector<Job> same{Job(job_spec({{10}, {20, 1, 1, {0}}}), 0.2)};
    CHECK(run(same, one_cluster()).outcomes[0].finish == 30);
}

TEST_CASE("a starved job keeps its running task") {
    // job 0 holds the cluster for 100 ticks; job 1 (cp 5, deadline 30) starves waiting
    std::vector<Job> jobs{Job(job_spec({{100, 10}, {5, 10, 1, {0}}}, 0, 50.0, ValueCurve(2.0, 6.0), 0), 0.2),
        Job(job_spec({{5, 10}}, 0, 100.0, ValueCurve(2.0, 6.0), 1), 0.2)};
    auto const r = run(jobs, one_cluster(10));
    CHECK(r.outcomes[0].finish == 105);
    CHECK(r.outcomes[1].starved);
    CHECK(std::isnan(r.outcomes[1].slr));
    CHECK(r.outcomes[1].value == 0.0);
    CHECK(r.outcomes[1].tasks_starved == 1);
    CHECK(audit_run(jobs, Platform(one_cluster(10), 0.2), r).empty());
}

TEST_CASE("incompatible workloads are rejected") {
    std::vector<Job> k2{Job(job_spec({{10, 1, 2}}), 0.2)};
    Platform p(one_cluster(), 0.2);
    CHECK_THROWS_AS(check_compatible(k2, p), ModelError);
    std::vector<Job> wide{Job(job_spec({{10, 101}}), 0.2)};
    CHECK_THROWS_AS(check_compatible(wide, p), ModelError);
    std::vector<Job> ids{Job(job_spec({{10}}, 0, 100.0, ValueCurve(2.0, 6.0), 4), 0.2)};
    CHECK_THROWS_AS(check_compatible(ids, p), ModelError);
}

TEST_CASE("generated runs pass the audit and are deterministic") {
    auto const jobs = small_workload(3, 60);
    auto const layout = Platform::default_layout(100);
    for (Policy p : all_policies) {
        auto const a = run(jobs, layout, p);
        auto const b = run(jobs, layout, p);
        CHECK(a.log == b.log);
        auto const problems = audit_run(jobs, Platform(layout, 0.2), a);
        CHECK_MESSAGE(problems.empty(), to_string(p), ": ", problems.empty() ? "" : problems[0]);

        double total = 0.0;
        double vmax = 0.0;
        for (auto const & o : a.outcomes) {
            total += o.value;
            vmax += o.vmax;
        }
        CHECK(total <= vmax);
    }
}

TEST_CASE("replaying the logged assignments reproduces the run") {
    auto const jobs = small_workload(5, 60);
    auto const layout = Platform::default_layout(100);
    auto const first = run(jobs, layout, Policy::pvr);

    std::multimap<Tick, LogRecord> starts;
    for (auto const & e : first.log) {
        if (e.type == EventType::start) {
            starts.emplace(e.tick, e);
        }
    }
    SimOptions opts;
    opts.clearer = [&](std::vector<BidEntry> bids, Platform & platform, Tick now, ClearingMode) {
        std::vector<Assignment> out;
        auto [lo, hi] = starts.equal_range(now);
        for (auto it = lo; it != hi; ++it) {
            auto const & e = it->second;
            for (auto const & b : bids) {
                if (b.job->id() == e.job && b.task->id == *e.task) {
                    Tick const fin = platform.cluster(*e.cluster).place(e.job, *b.task, now);
                    out.push_back({e.job, *e.task, *e.cluster, now, fin, *e.bid});
                }
            }
        }
        return out;
    };
    // random policy so the replay cannot lean on the bids
    auto const again = run(jobs, layout, Policy::random, opts);
    REQUIRE(again.outcomes.size() == first.outcomes.size());
    for (std::size_t i = 0; i < first.outcomes.size(); ++i) {
        CHECK(again.outcomes[i].finish == first.outcomes[i].finish);
        CHECK(again.outcomes[i].starved == first.outcomes[i].starved);
    }
}

TEST_CASE("log record format") {
    CHECK(format_log_record({5, EventType::arrive, 3, {}, {}, {}}) == "5,arrive,3,,,");
    CHECK(format_log_record({7, EventType::start, 3, 2, 1, 0.5}) == "7,start,3,2,1,0.5");
}
