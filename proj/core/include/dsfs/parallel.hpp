#pragma once

#include <cstddef>
#include <functional>

namespace dsfs {

// Runs fn(i) for every i in [0, count) using up to `threads` workers.
// Callers must write results into disjoint index-addressed slots; with that
// discipline the output is identical for any thread count. threads <= 1 runs
// inline. The first exception thrown by a worker is rethrown on the caller.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace dsfs
