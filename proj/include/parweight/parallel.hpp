#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace parweight {

/// Default worker count: PARWEIGHT_JOBS if set, else 1.
inline int default_jobs() {
  if (const char* env = std::getenv("PARWEIGHT_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

/// Runs f(i) for i in [0, count) on `jobs` threads.  Iterations must be
/// independent; each writes only to its own output slot.
template <class F>
void parallel_for(std::int64_t count, int jobs, F&& f) {
  if (jobs <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  int threads = static_cast<int>(std::min<std::int64_t>(jobs, count));
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace parweight
