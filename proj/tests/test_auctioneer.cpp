#include <doctest.h>

#include <random>

#include <mbsched/auctioneer.hpp>

#include "reference_clear.hpp"
#include "test_util.hpp"

using namespace mbs;
using mbs::test::make_job;

namespace {

BidEntry entry(Job const & job, TaskId t, double value, BidSense s = BidSense::highest_wins) {
    return {Bid{value, s, {job.arrive(), job.id(), t}}, &job, &job.task(t)};
}

std::vector<ClusterSpec> layout(std::initializer_list<std::pair<int, int>> kc) {
    std::vector<ClusterSpec> out;
    for (auto [k, c] : kc) {
        out.push_back({Kind{k}, c});
    }
    return out;
}

}  // namespace

TEST_CASE("single bidder goes to the only cluster") {
    auto const specs = layout({{1, 100}});
    Platform p(specs, 0.2);
    auto const a = make_job({{7, 10}});
    auto const got = clear({entry(a, 0, 5.0)}, p, 3);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == Assignment{0, 0, 0, 3, 10, 5.0});
    CHECK(p.cluster(0).free_cores() == 90);
}

TEST_CASE("blocked top bidder halts clearing") {
    auto const specs = layout({{1, 250}, {1, 100}});
    Platform p(specs, 0.2);
    auto const hog = make_job({{50, 100}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 2);
    p.cluster(0).place(2, hog.task(0), 0);

    auto const big = make_job({{5, 200}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 0);
    auto const small = make_job({{5, 10}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 1);
    CHECK(clear({entry(big, 0, 9.0), entry(small, 0, 1.0)}, p, 1).empty());
    CHECK(p.cluster(1).free_cores() == 100);
}

TEST_CASE("two winners in one instant") {
    auto const t1 = make_job({{5, 60}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 0);
    auto const t2 = make_job({{5, 60}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 1);

    auto const two = layout({{1, 100}, {1, 80}});
    Platform p(two, 0.2);
    auto const got = clear({entry(t2, 0, 1.0), entry(t1, 0, 2.0)}, p, 0);
    REQUIRE(got.size() == 2);
    CHECK(got[0].job == 0);
    CHECK(got[0].cluster == 0);
    CHECK(got[1].job == 1);
    CHECK(got[1].cluster == 1);

    auto const one = layout({{1, 100}});
    Platform q(one, 0.2);
    auto const halted = clear({entry(t2, 0, 1.0), entry(t1, 0, 2.0)}, q, 0);
    REQUIRE(halted.size() == 1);
    CHECK(halted[0].job == 0);
    CHECK(q.cluster(0).free_cores() == 40);
}

TEST_CASE("equal free cores go to the lowest cluster id") {
    auto const specs = layout({{2, 50}, {1, 50}, {1, 50}});
    Platform p(specs, 0.2);
    auto const a = make_job({{5, 10}});
    auto const got = clear({entry(a, 0, 1.0)}, p, 0);
    REQUIRE(got.size() == 1);
    CHECK(got[0].cluster == 1);
}

TEST_CASE("per-kind clearing only blocks the stuck kind") {
    auto const specs = layout({{1, 100}, {2, 100}});
    auto const hog = make_job({{50, 100, 2}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 9);
    auto const k2 = make_job({{5, 10, 2}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 0);
    auto const k1 = make_job({{5, 10, 1}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 1);
    auto const k2b = make_job({{5, 1, 2}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 2);
    std::vector<BidEntry> const bids{entry(k2, 0, 3.0), entry(k1, 0, 2.0), entry(k2b, 0, 1.0)};

    Platform g(specs, 0.2);
    g.cluster(1).place(9, hog.task(0), 0);
    CHECK(clear(bids, g, 1, ClearingMode::global_halt).empty());

    Platform k(specs, 0.2);
    k.cluster(1).place(9, hog.task(0), 0);
    auto const got = clear(bids, k, 1, ClearingMode::per_kind);
    REQUIRE(got.size() == 1);
    CHECK(got[0].job == 1);
}

TEST_CASE("clear matches the reference auctioneer") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> cores(1, 60);
    std::uniform_int_distribution<int> kind(1, 2);
    std::uniform_int_distribution<int> ntasks(1, 6);
    std::uniform_int_distribution<int> bidv(0, 5);
    for (int i = 0; i < 500; ++i) {
        auto const specs = layout({{1, 60 + cores(rng)}, {kind(rng), 60 + cores(rng)}});
        std::vector<Job> jobs;
        int const n = ntasks(rng);
        for (int t = 0; t < n; ++t) {
            jobs.push_back(make_job({{5, cores(rng), specs[1].kind.id == 2 ? kind(rng) : 1}}, 0.2, bidv(rng),
                100.0, ValueCurve(2.0, 6.0), static_cast<JobId>(t)));
        }
        auto const sense = i % 2 ? BidSense::highest_wins : BidSense::lowest_wins;
        std::vector<BidEntry> bids;
        for (auto const & j : jobs) {
            // small integer bids so ties are common
            bids.push_back(entry(j, 0, bidv(rng), sense));
        }
        for (auto mode : {ClearingMode::global_halt, ClearingMode::per_kind}) {
            Platform a(specs, 0.2);
            Platform b(specs, 0.2);
            auto const got = clear(bids, a, 4, mode);
            auto const want = mbs::test::reference_clear(bids, b, 4, mode);
            CHECK(got == want);

            // winners come out in priority order
            for (std::size_t w = 1; w < got.size(); ++w) {
                auto const & prev = jobs[got[w - 1].job];
                auto const & cur = jobs[got[w].job];
                Bid const pb{got[w - 1].bid, sense, {prev.arrive(), prev.id(), 0}};
                Bid const cb{got[w].bid, sense, {cur.arrive(), cur.id(), 0}};
                CHECK(outranks(pb, cb));
            }
        }
    }
}

TEST_CASE("ready queue") {
    auto const a = make_job({{1}, {1}, {1}}, 0.2, 5, 100.0, ValueCurve(2.0, 6.0), 1);
    auto const b = make_job({{1}}, 0.2, 3, 100.0, ValueCurve(2.0, 6.0), 2);
    ReadyQueue q;
    CHECK(q.push(a, 2));
    CHECK(q.push(a, 0));
    CHECK(q.push(b, 0));
    CHECK_FALSE(q.push(a, 0));
    CHECK(q.size() == 3);
    CHECK(q.begin()->job == 2);
    CHECK(q.erase_job(a) == 2);
    CHECK(q.size() == 1);
    CHECK(q.contains(b, 0));

    std::vector<Job> jobs{make_job({{10}}), make_job({{40}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 1)};
    ReadyQueue r;
    CHECK(make_context(r, jobs, 7).max_cp_in_queue == 1);
    r.push(jobs[1], 0);
    CHECK(make_context(r, jobs, 7).max_cp_in_queue == 40);
}

TEST_CASE("starve sweep uses a strict deadline") {
    std::vector<Job> jobs{make_job({{10}, {10}})};
    std::vector<JobState> states{JobState::live};
    DeadlineTracker deadlines;
    deadlines.add(jobs[0]);
    ReadyQueue q;
    q.push(jobs[0], 1);

    CHECK(starve_sweep(60, jobs, states, deadlines, q).empty());
    CHECK(states[0] == JobState::live);
    auto const gone = starve_sweep(61, jobs, states, deadlines, q);
    CHECK(gone == std::vector<JobId>{0});
    CHECK(states[0] == JobState::starved);
    CHECK(q.empty());
    CHECK(starve_sweep(62, jobs, states, deadlines, q).empty());
}

TEST_CASE("completed jobs are not starved later") {
    std::vector<Job> jobs{make_job({{10}})};
    std::vector<JobState> states{JobState::completed};
    DeadlineTracker deadlines;
    deadlines.add(jobs[0]);
    ReadyQueue q;
    CHECK(starve_sweep(100, jobs, states, deadlines, q).empty());
    CHECK(states[0] == JobState::completed);
}
