#include "hmlab/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace hmlab {
namespace {
std::atomic<int> g_threads{1};
}

int max_threads() { return g_threads.load(); }

void set_max_threads(int n) { g_threads.store(n < 1 ? 1 : n); }

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const int t = max_threads();
  if (t <= 1 || n < 2048) {
    fn(0, n);
    return;
  }
  const std::size_t workers = static_cast<std::size_t>(t);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = w * chunk;
    if (b >= n) break;
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  fn(0, std::min(n, chunk));
  for (auto& th : pool) th.join();
}

}  // namespace hmlab
