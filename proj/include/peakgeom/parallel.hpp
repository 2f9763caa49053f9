#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace peakgeom {

// Index-parallel map. Each index writes only its own slot, so results are
// identical for any thread count; callers reduce in index order afterwards.
inline void parallel_for(long n, int threads, const std::function<void(long)>& body) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2 * threads) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long begin = t * chunk;
        long end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (long i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace peakgeom
