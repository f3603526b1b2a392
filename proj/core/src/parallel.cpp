#include "chmhd/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace chmhd {

namespace {

// Fixed chunk size keeps the work partition independent of the thread count.
constexpr int kChunk = 256;

int g_threads = 1;

} // namespace

void set_thread_count(int k) { g_threads = std::max(1, k); }

int thread_count() { return g_threads; }

int n_chunks(int n_items) { return (n_items + kChunk - 1) / kChunk; }

void parallel_chunks(int n_items, const std::function<void(int, int, int)>& fn) {
  const int chunks = n_chunks(n_items);
  auto run_chunk = [&](int c) {
    const int begin = c * kChunk;
    const int end = std::min(n_items, begin + kChunk);
    fn(c, begin, end);
  };
  if (g_threads <= 1 || chunks <= 1) {
    for (int c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<int> next{0};
  const int workers = std::min(g_threads, chunks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run_chunk(c);
    });
  }
  for (auto& t : pool) t.join();
}

} // namespace chmhd
