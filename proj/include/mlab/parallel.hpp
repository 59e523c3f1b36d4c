#pragma once

#include <cstddef>
#include <functional>

namespace mlab {

/// Worker count for parallel loops: explicit setting, else MLAB_THREADS, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(begin, end) over a static contiguous partition of [0, n).
/// Results never depend on the partition as long as each index writes only its own output.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mlab
