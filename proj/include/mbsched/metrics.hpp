#pragma once

#include <array>
#include <span>

#include <mbsched/simulator.hpp>

namespace mbs {

/// Sum of achieved value over sum of vmax, over all submitted jobs.
double normalized_value(std::span<OutcomeRecord const> outcomes);

struct Starvation {
    std::size_t jobs = 0;
    double job_fraction = 0.0;
    std::size_t tasks = 0;
    double task_fraction = 0.0;
};

Starvation starvation_count(std::span<OutcomeRecord const> outcomes);

enum class DecileKey { total_work, critical_path };

struct DecileSlr {
    /// Mean achieved SLR per decile, smallest jobs first; NaN for an empty decile.
    std::array<double, 10> mean{};
    std::array<std::size_t, 10> size{};
    /// Starved jobs left out of the statistics.
    std::size_t excluded = 0;
};

/// Completed jobs sorted by size and split into ten equal-count groups, the
/// remainder going to the leading groups.
DecileSlr slr_by_decile(std::span<OutcomeRecord const> outcomes, DecileKey key = DecileKey::total_work);

}  // namespace mbs
