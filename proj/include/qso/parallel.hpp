#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qso {

/// Worker cap: QSO_THREADS when set, hardware concurrency otherwise.
inline unsigned worker_count() {
  if (const char* env = std::getenv("QSO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs fn(chunk_index) for chunk_index in [0, n_chunks) and collects results
/// in chunk order. Work is split statically, so results do not depend on the
/// worker count; callers derive any randomness from the chunk index.
template <typename R>
std::vector<R> parallel_chunks(std::size_t n_chunks, const std::function<R(std::size_t)>& fn) {
  std::vector<R> results(n_chunks);
  const unsigned workers = std::min<std::size_t>(worker_count(), n_chunks ? n_chunks : 1);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) results[c] = fn(c);
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (std::size_t c = w; c < n_chunks; c += workers) results[c] = fn(c);
    });
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace qso
