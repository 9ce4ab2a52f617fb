#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace echoform::parallel {

// Worker count resolution: explicit request > ECHOFORM_THREADS > hardware.
inline int resolve_workers(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ECHOFORM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index writes
// only its own slot, so results are identical for any worker count; callers
// do any cross-index reduction afterwards, in fixed index order.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    workers = std::min(workers < 1 ? 1 : workers, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace echoform::parallel
