#include "gaborfio/parallel.hpp"
#include "gaborfio/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gaborfio {
namespace {
std::atomic<int> g_threads{1};
}

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_grid_representable: return "not_grid_representable";
    case ErrorKind::incommensurate_lattice: return "incommensurate_lattice";
    case ErrorKind::not_a_frame: return "not_a_frame";
    case ErrorKind::insufficient_range: return "insufficient_range";
    case ErrorKind::extraction_radius: return "extraction_radius";
    case ErrorKind::newton_divergence: return "newton_divergence";
    case ErrorKind::size_guard: return "size_guard";
    case ErrorKind::config: return "config";
    }
    return "unknown";
}

void set_thread_count(int threads) { g_threads = std::max(1, threads); }

int thread_count() { return g_threads; }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(g_threads.load()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace gaborfio
