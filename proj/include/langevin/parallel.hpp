#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace langevin {

/// Worker count resolution: explicit value wins, then LANGEVIN_KIT_THREADS,
/// then all hardware threads. 0 means "all cores".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (requested == 0) {
    if (const char* env = std::getenv("LANGEVIN_KIT_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) return n;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(i) for i in [0, count) across `threads` workers. Results must be
/// written to pre-sized per-index slots; the partition is deterministic.
inline void parallel_for(std::int64_t count, int threads,
                         const std::function<void(std::int64_t)>& body) {
  const int workers = std::min<std::int64_t>(resolve_threads(threads), count > 0 ? count : 1);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::int64_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace langevin
