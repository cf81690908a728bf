#pragma once

// Minimal fork-join helper for embarrassingly parallel sweeps. Results are
// always returned in index order, so output does not depend on the job count.

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace cavqed {

/// Number of workers to use for `requested` (0 means hardware concurrency).
std::size_t resolve_jobs(std::size_t requested);

/// Calls body(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

template <class T, class F>
std::vector<T> parallel_map(std::size_t count, std::size_t jobs, F&& f) {
  std::vector<T> out(count);
  parallel_for(count, jobs, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace cavqed
