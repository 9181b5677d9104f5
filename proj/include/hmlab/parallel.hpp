#pragma once

#include <cstddef>
#include <functional>

namespace hmlab {

// Process-wide worker count for node-parallel maps.  Results are identical
// for any setting: parallel regions only ever write disjoint indices and all
// reductions go through the fixed-order kernels.
int max_threads();
void set_max_threads(int n);

// Invokes fn(begin, end) on contiguous chunks of [0, n), possibly from
// several threads.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

template <class F>
void parallel_for(std::size_t n, F&& f) {
  parallel_chunks(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) f(i);
  });
}

}  // namespace hmlab
