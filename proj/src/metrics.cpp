#include <mbsched/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

namespace mbs {

double normalized_value(std::span<OutcomeRecord const> outcomes) {
    double achieved = 0.0;
    double possible = 0.0;
    for (auto const & o : outcomes) {
        achieved += o.value;
        possible += o.vmax;
    }
    return possible > 0.0 ? achieved / possible : 0.0;
}

Starvation starvation_count(std::span<OutcomeRecord const> outcomes) {
    Starvation s;
    std::size_t tasks = 0;
    for (auto const & o : outcomes) {
        tasks += o.tasks;
        if (o.starved) {
            ++s.jobs;
            s.tasks += o.tasks_starved;
        }
    }
    if (!outcomes.empty()) {
        s.job_fraction = static_cast<double>(s.jobs) / static_cast<double>(outcomes.size());
    }
    if (tasks > 0) {
        s.task_fraction = static_cast<double>(s.tasks) / static_cast<double>(tasks);
    }
    return s;
}

DecileSlr slr_by_decile(std::span<OutcomeRecord const> outcomes, DecileKey key) {
    DecileSlr out;
    // (size key, job id) makes the order independent of record order
    std::vector<std::tuple<double, JobId, double>> done;
    for (auto const & o : outcomes) {
        if (o.starved) {
            ++out.excluded;
            continue;
        }
        double const k = key == DecileKey::total_work ? o.total_work : static_cast<double>(o.cp);
        done.emplace_back(k, o.job, achieved_slr(o));
    }
    std::sort(done.begin(), done.end());

    std::size_t const base = done.size() / 10;
    std::size_t const extra = done.size() % 10;
    std::size_t pos = 0;
    for (std::size_t d = 0; d < 10; ++d) {
        std::size_t const n = base + (d < extra ? 1 : 0);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += std::get<2>(done[pos + i]);
        }
        out.size[d] = n;
        out.mean[d] = n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
        pos += n;
    }
    return out;
}

}  // namespace mbs
