#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace odo {

// Static contiguous chunks; each index is written by exactly one worker, so
// results are bit-identical for any thread count.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
    if (threads <= 1 || n < 2) {
        body(std::size_t(0), n, 0);
        return;
    }
    const int nt = static_cast<int>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e, t] { body(b, e, t); });
    }
    for (auto& th : pool) th.join();
}

} // namespace odo
