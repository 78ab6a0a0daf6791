#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace twc {

// Thread cap: TWC_THREADS env var, else hardware concurrency.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("TWC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return unsigned(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1u;
}

// Runs body(i) for i in [begin, end). Each index is executed exactly once and
// tasks write to disjoint slots; reductions stay with the caller so summation
// order is deterministic.
inline void parallel_for(std::size_t begin, std::size_t end,
                         const std::function<void(std::size_t)>& body) {
    const std::size_t count = end > begin ? end - begin : 0;
    const unsigned nt = std::min<std::size_t>(thread_cap(), count);
    if (nt <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([=, &body] {
            for (std::size_t i = begin + t; i < end; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace twc
