#pragma once

#include <cstddef>
#include <functional>

namespace akat {

// Process-wide worker count for data-parallel sweeps (CLI --workers).
int& worker_count();

// Runs work(chunk) for chunk = 0..n_chunks-1 on up to worker_count() threads.
// Chunks must write results into per-chunk slots only; with that discipline
// the outcome is bit-identical for any worker count.
void parallel_chunks(size_t n_chunks, const std::function<void(size_t)>& work);

}  // namespace akat
