#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace despeckle {

namespace detail {
inline std::atomic<std::size_t> g_worker_count{0};
}

/// Number of worker threads used by row-parallel kernels. 0 selects
/// std::thread::hardware_concurrency().
inline void set_worker_count(std::size_t n) { detail::g_worker_count.store(n); }

inline std::size_t worker_count() {
    std::size_t n = detail::g_worker_count.load();
    if (n == 0) {
        n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return n;
}

/// Calls fn(row) for every row in [0, rows). Rows are split into contiguous
/// blocks, one per worker. Each row must be written by exactly one call and
/// must not depend on other rows of the same output, so the result is
/// independent of the worker count.
template <typename Fn>
void parallel_rows(std::size_t rows, Fn&& fn) {
    const std::size_t workers = std::min(worker_count(), rows);
    if (workers <= 1) {
        for (std::size_t r = 0; r < rows; ++r) fn(r);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t block = (rows + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(rows, begin + block);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t r = begin; r < end; ++r) fn(r);
        });
    }
    for (std::size_t r = 0; r < std::min(rows, block); ++r) fn(r);
}

}  // namespace despeckle
