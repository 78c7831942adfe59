#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tfub {

/// TFUB_THREADS if set and positive, else hardware concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("TFUB_THREADS")) {
    try {
      int t = std::stoi(env);
      if (t > 0) return t;
    } catch (...) {
    }
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

inline int resolve_threads(int requested) { return requested > 0 ? requested : default_threads(); }

struct IndexRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
};

/// Splits [0, total) into contiguous chunks handed out in order to `threads` workers.
/// body(range, worker) must only touch per-worker state; exceptions are rethrown.
template <typename Body>
void parallel_chunks(std::uint64_t total, int threads, Body&& body, std::uint64_t min_chunk = 4096) {
  if (total == 0) return;
  threads = std::max(1, threads);
  std::uint64_t chunk = std::max<std::uint64_t>(min_chunk, total / (static_cast<std::uint64_t>(threads) * 16) + 1);
  std::uint64_t nchunks = (total + chunk - 1) / chunk;
  if (threads == 1 || nchunks == 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) body(IndexRange{c * chunk, std::min(total, (c + 1) * chunk)}, 0);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](int id) {
    try {
      for (;;) {
        std::uint64_t c = next.fetch_add(1);
        if (c >= nchunks) break;
        body(IndexRange{c * chunk, std::min(total, (c + 1) * chunk)}, id);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(nchunks);
    }
  };
  int used = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), nchunks));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  for (int t = 0; t < used; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Smallest index in [0, total) for which hit(index, worker) is true, or UINT64_MAX.
/// hit is called on ascending indices inside each chunk; chunks past the best hit are skipped,
/// so the answer does not depend on the thread count.
template <typename MakeScanner>
std::uint64_t parallel_find_first(std::uint64_t total, int threads, MakeScanner&& scan) {
  std::atomic<std::uint64_t> best{UINT64_MAX};
  parallel_chunks(total, threads, [&](IndexRange r, int worker) {
    if (r.begin >= best.load(std::memory_order_relaxed)) return;
    std::uint64_t found = scan(r, worker, best);
    if (found == UINT64_MAX) return;
    std::uint64_t cur = best.load();
    while (found < cur && !best.compare_exchange_weak(cur, found)) {
    }
  });
  return best.load();
}

}  // namespace tfub
