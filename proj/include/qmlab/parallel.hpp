#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace qmlab {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
/// be independent; callers keep determinism by storing results per index.
inline void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            fn(i);
        }
    };
    const std::size_t n_workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& th : pool) {
        th.join();
    }
}

}  // namespace qmlab
