#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace berglab {

// Global worker cap (CLI --threads). 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(chunk_index) for chunk_index in [0, num_chunks). Chunks are claimed
// from an atomic counter, so any chunk may run on any thread; callers must
// write results into per-chunk slots and reduce in chunk order afterwards.
// That keeps every result bitwise independent of the worker count.
inline void parallel_chunks(std::size_t num_chunks,
                            const std::function<void(std::size_t)>& fn) {
  unsigned workers = max_threads();
  if (workers > num_chunks) workers = static_cast<unsigned>(num_chunks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < num_chunks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= num_chunks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace berglab
