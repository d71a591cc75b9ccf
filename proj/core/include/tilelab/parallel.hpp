#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace tilelab {

// Runs body(i) for i in [0, n). Each index writes only its own output slot,
// so results are identical to the serial order regardless of scheduling;
// reductions over the slots stay deterministic.
template <typename Body>
void parallel_for_index(std::size_t n, const Body& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned workers = std::min<std::size_t>(hw, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tilelab
