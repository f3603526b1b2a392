#pragma once

#include <functional>

namespace chmhd {

// Global worker cap for the chunked loops below (1 = serial, the default).
void set_thread_count(int k);
int thread_count();

// Runs fn(chunk_index, begin, end) over [0, n_items) in fixed-size chunks.
// The chunk partition does not depend on the thread count and callers combine
// per-chunk results in chunk order, so outputs are bit-identical for any
// thread count. fn must only write to per-chunk storage.
void parallel_chunks(int n_items, const std::function<void(int, int, int)>& fn);

int n_chunks(int n_items);

} // namespace chmhd
