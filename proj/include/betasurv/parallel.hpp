#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace betasurv {

constexpr std::size_t kReduceBlock = 4096;

// Evaluates fn(begin, end) over fixed-size row blocks and folds the partial
// results in block order, so totals are bit-identical for any thread count.
template <typename Partial, typename BlockFn, typename CombineFn>
Partial blocked_reduce(std::size_t n, int threads, BlockFn fn, CombineFn combine, Partial acc) {
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    if (nblocks == 0) return acc;
    std::vector<Partial> partials(nblocks);
    auto run = [&](std::size_t k) {
        const std::size_t b0 = k * kReduceBlock;
        const std::size_t b1 = std::min(n, b0 + kReduceBlock);
        partials[k] = fn(b0, b1);
    };
    if (threads <= 1 || nblocks == 1) {
        for (std::size_t k = 0; k < nblocks; ++k) run(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), nblocks);
        pool.reserve(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t k = next.fetch_add(1);
                    if (k >= nblocks) return;
                    run(k);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t k = 0; k < nblocks; ++k) acc = combine(std::move(acc), partials[k]);
    return acc;
}

}  // namespace betasurv
