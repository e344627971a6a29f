#include <doctest.h>

#include <cmath>
#include <random>

#include <mbsched/policies.hpp>

#include "test_util.hpp"

using namespace mbs;
using mbs::test::make_job;

namespace {

QueueContext at(Tick now, Tick max_cp = 10) { return {now, max_cp}; }

Bid bid_of(Policy p, Job const & job, TaskId t, QueueContext ctx) {
    std::mt19937_64 rng(0);
    return make_bid(p, job.task(t), job, ctx, rng);
}

}  // namespace

TEST_CASE("policy names round-trip") {
    for (Policy p : all_policies) {
        CHECK(parse_policy(to_string(p)) == p);
    }
    CHECK_FALSE(parse_policy("PVR").has_value());
    CHECK_FALSE(parse_policy("").has_value());
    CHECK(sense(Policy::fifo) == BidSense::lowest_wins);
    CHECK(sense(Policy::srtf) == BidSense::lowest_wins);
    CHECK(sense(Policy::edf) == BidSense::lowest_wins);
    CHECK(sense(Policy::pvr) == BidSense::lowest_wins);
    CHECK(sense(Policy::lrtf) == BidSense::highest_wins);
    CHECK(sense(Policy::pvdsq) == BidSense::highest_wins);
}

TEST_CASE("p_slr examples") {
    auto const j10 = make_job({{10}});
    CHECK(p_slr(j10.task(0), j10, at(0)) == 1.0);
    CHECK(p_slr(j10.task(0), j10, at(5)) == 1.5);
    auto const mixed = make_job({{10, 1, 1}, {20, 1, 2, {0}}});
    CHECK(p_slr(mixed.task(0), mixed, at(0)) == 1.0);
}

TEST_CASE("fifo, srtf and lrtf") {
    auto const a = make_job({{10}}, 0.2, 100);
    CHECK(bid_fifo(a) == 100.0);

    auto const early = make_job({{10}}, 0.2, 50, 100.0, ValueCurve(2.0, 6.0), 1);
    auto const late = make_job({{10}}, 0.2, 70, 100.0, ValueCurve(2.0, 6.0), 0);
    CHECK(outranks(bid_of(Policy::fifo, early, 0, at(80)), bid_of(Policy::fifo, late, 0, at(80))));

    auto const twins = make_job({{10}, {10}});
    CHECK(outranks(bid_of(Policy::fifo, twins, 0, at(0)), bid_of(Policy::fifo, twins, 1, at(0))));
    auto const other = make_job({{10}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 3);
    CHECK(outranks(bid_of(Policy::fifo, twins, 1, at(0)), bid_of(Policy::fifo, other, 0, at(0))));

    auto const chain = make_job({{10}, {20, 1, 1, {0}}});
    auto const a30 = bid_of(Policy::srtf, chain, 0, at(0));
    auto const b20 = bid_of(Policy::srtf, chain, 1, at(0));
    CHECK(a30.value == 30.0);
    CHECK(outranks(b20, a30));
    CHECK(outranks(bid_of(Policy::lrtf, chain, 0, at(0)), bid_of(Policy::lrtf, chain, 1, at(0))));
}

TEST_CASE("P-SLR bid examples") {
    auto const j = make_job({{10}});
    CHECK(bid_pslr(j.task(0), j, at(0, 10)) == doctest::Approx(1.1));
    CHECK(bid_pslr(j.task(0), j, at(25, 10)) == doctest::Approx(7.6));

    auto const small = make_job({{10}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 0);
    auto const big = make_job({{20}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 1);
    auto const ctx = at(0, 20);
    CHECK(bid_pslr(small.task(0), small, ctx) > bid_pslr(big.task(0), big, ctx));
}

TEST_CASE("P-SLR eventually favours a waiting task over any newcomer") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<Tick> len(1, 2000);
    for (int i = 0; i < 200; ++i) {
        Tick const cp_old = len(rng);
        Tick const cp_new = len(rng);
        Tick const max_cp = std::max(cp_old, cp_new);
        auto const waiting = make_job({{cp_old}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0), 0);
        bool overtook = false;
        for (Tick now = 0; now <= 50 * max_cp && !overtook; now += max_cp / 4 + 1) {
            auto const fresh = make_job({{cp_new}}, 0.2, now, 100.0, ValueCurve(2.0, 6.0), 1);
            QueueContext const ctx{now, max_cp};
            overtook = bid_pslr(waiting.task(0), waiting, ctx) > bid_pslr(fresh.task(0), fresh, ctx);
        }
        CHECK(overtook);
    }
}

TEST_CASE("EDF bid examples") {
    CHECK(bid_edf(make_job({{10}}, 0.2, 0, 100.0, ValueCurve(2.0, 6.0))) == 60.0);
    CHECK(bid_edf(make_job({{5}}, 0.2, 100, 100.0, ValueCurve(2.0, 8.0))) == 140.0);
}

TEST_CASE("value-based bids") {
    auto const j = make_job({{10}});
    CHECK(bid_pv(j.task(0), j, at(5)) == 100.0);
    CHECK(bid_pv(j.task(0), j, at(30)) == doctest::Approx(50.0));
    CHECK(bid_pv(j.task(0), j, at(60)) == 0.0);
    CHECK(bid_pv(j.task(0), j, at(200)) == 0.0);

    auto const ab = make_job({{10, 2}, {5, 4, 1, {0}}});
    CHECK(succ_sum(ab.task(0)) == 40.0);
    CHECK(bid_pvd(ab.task(0), ab, at(0)) == doctest::Approx(2.5));
    CHECK(bid_pvdsq(ab.task(0), ab, at(0)) == doctest::Approx(6.25));
    CHECK(bid_pvd(ab.task(0), ab, at(200)) == 0.0);
    CHECK(bid_pvdsq(ab.task(0), ab, at(200)) == 0.0);

    auto const diamond = make_job({{1}, {2, 1, 1, {0}}, {3, 1, 1, {0}}, {4, 1, 1, {1, 2}}});
    CHECK(succ_sum(diamond.task(0), SuccSumMode::recursive) == 14.0);
    CHECK(bid_pvd(diamond.task(0), diamond, at(0), SuccSumMode::recursive) == doctest::Approx(100.0 / 14.0));

    CHECK(bid_pvr(j.task(0), j, at(30)) == doctest::Approx(50.0));
    CHECK(bid_pvr(j.task(0), j, at(0)) == doctest::Approx(300.0));
    CHECK(bid_pvr(j.task(0), j, at(60)) == 0.0);
    CHECK(bid_pvr(j.task(0), j, at(90)) == 0.0);
}

TEST_CASE("random bids") {
    std::mt19937_64 r1(42);
    std::mt19937_64 r2(42);
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = 0; i < 10000; ++i) {
        double const x = bid_random(r1);
        double const y = bid_random(r1);
        CHECK((x >= 0.0 && x < 1.0));
        CHECK(bid_random(r2) == x);
        CHECK(bid_random(r2) == y);
        xs.push_back(x);
        ys.push_back(y);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    // 4 standard errors of r under independence
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.04);
}

TEST_CASE("bids are pure for deterministic policies") {
    auto const j = make_job({{10, 2}, {5, 4, 2, {0}}, {7, 1, 1, {0}}});
    for (Policy p : all_policies) {
        if (p == Policy::random) {
            continue;
        }
        for (TaskId t = 0; t < 3; ++t) {
            CHECK(bid_of(p, j, t, at(13, 40)).value == bid_of(p, j, t, at(13, 40)).value);
        }
    }
}

TEST_CASE("PVD and PVDSQ pick the same winner") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<Tick> exec(1, 40);
    std::uniform_int_distribution<int> cores(1, 8);
    std::uniform_int_distribution<Tick> when(0, 300);
    for (int i = 0; i < 500; ++i) {
        std::vector<Job> jobs;
        for (JobId k = 0; k < 4; ++k) {
            jobs.push_back(make_job({{exec(rng), cores(rng)}, {exec(rng), cores(rng), 1, {0}}}, 0.2, when(rng) / 4,
                50.0 + static_cast<double>(k), ValueCurve(2.0, 6.0), k));
        }
        QueueContext const ctx{when(rng), 80};
        std::optional<Bid> best_pvd;
        std::optional<Bid> best_pvdsq;
        for (auto const & job : jobs) {
            for (TaskId t = 0; t < 2; ++t) {
                auto const a = bid_of(Policy::pvd, job, t, ctx);
                auto const b = bid_of(Policy::pvdsq, job, t, ctx);
                if (!best_pvd || outranks(a, *best_pvd)) {
                    best_pvd = a;
                }
                if (!best_pvdsq || outranks(b, *best_pvdsq)) {
                    best_pvdsq = b;
                }
            }
        }
        CHECK(best_pvd->tiebreak == best_pvdsq->tiebreak);
    }
}
