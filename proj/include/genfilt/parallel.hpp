#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace genfilt {

/// Process-wide worker count for the cell- and column-parallel loops.
/// Results never depend on it: every loop writes to disjoint slots and all
/// reductions happen afterwards in index order.
unsigned thread_count();
void set_thread_count(unsigned n);

/// Calls body(k) for every k in [0, n), split into contiguous chunks.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::int64_t>(thread_count(), std::max<std::int64_t>(n, 1)));
    if (workers <= 1) {
        for (std::int64_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::int64_t k = lo; k < hi; ++k) body(k);
        });
    }
}

}  // namespace genfilt
