#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace sdwave {

/// Worker count from SDWAVE_WORKERS (default 1). Output assembly stays
/// deterministic because tasks write to preallocated, index-addressed slots.
inline int worker_count() {
    const char* env = std::getenv("SDWAVE_WORKERS");
    if (!env) return 1;
    const int v = std::atoi(env);
    if (v < 1) return 1;
    return v > 64 ? 64 : v;
}

/// Runs f(i) for i in [0, count) on up to `workers` threads. The caller's f
/// must only touch slot i of any shared output.
template <class F>
void parallel_for(std::size_t count, F&& f, int workers = worker_count()) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    const int nthreads = static_cast<int>(std::min<std::size_t>(count, workers));
    for (int w = 0; w < nthreads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    f(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sdwave
