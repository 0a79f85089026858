#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace adbl2 {

/// Calls fn(i) for every i in [0, count) on at most `max_workers` threads.
/// Callers write results into pre-sized slots by index, so output order never
/// depends on completion order. fn must not throw.
template <typename Fn>
void parallel_for_index(std::size_t count, std::size_t max_workers, Fn&& fn) {
    auto workers = std::min(count, std::max<std::size_t>(1, max_workers));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
}

}  // namespace adbl2
