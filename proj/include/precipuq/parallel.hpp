#pragma once

#include <cstddef>
#include <functional>

namespace precipuq {

// Runs fn(0), ..., fn(n-1) on up to `jobs` worker threads. Tasks must write
// to disjoint state; under that contract the result is identical for any job
// count, so thread count stays a pure runtime knob.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace precipuq
