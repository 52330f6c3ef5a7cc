#pragma once

#include <cstddef>
#include <functional>

namespace gaborfio {

/// Worker count used by parallel_for. Defaults to 1; the CLI sets it from
/// --threads or GABORFIO_THREADS.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, count). Each index is visited exactly once and
/// bodies must only write to slots owned by their index, so results do not
/// depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace gaborfio
