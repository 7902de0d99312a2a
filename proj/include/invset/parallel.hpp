#pragma once

#include <cstddef>
#include <functional>

namespace invset {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; callers write results into slot i, so the outcome
/// does not depend on the schedule. The first exception is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Job count from INVSET_JOBS, falling back to 1.
int default_jobs();

}  // namespace invset
