// reduction.hpp — deterministic parallel reduction.
//
// Double sums are partitioned into fixed row chunks; each chunk is summed
// sequentially, and the chunk partials are combined with a fixed pairwise
// tree.  The result is bit-identical for any worker count because neither the
// partition nor the combine order depends on scheduling.

#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace tp2a {

inline constexpr std::size_t kReductionChunk = 64;

template <class T>
T pairwise_combine(std::vector<T> v) {
    if (v.empty()) return T{};
    std::size_t n = v.size();
    while (n > 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) v[i] += v[i + half];
        n = half;
    }
    return v[0];
}

// sum over rows [0, nrows) of fn(row), where fn returns the row partial.
template <class T, class Fn>
T parallel_rows_sum(std::size_t nrows, int threads, Fn&& fn) {
    const std::size_t nchunks = (nrows + kReductionChunk - 1) / kReductionChunk;
    std::vector<T> partials(nchunks, T{});

    auto run_chunk = [&](std::size_t c) {
        const std::size_t lo = c * kReductionChunk;
        const std::size_t hi = std::min(nrows, lo + kReductionChunk);
        T acc{};
        for (std::size_t r = lo; r < hi; ++r) acc += fn(r);
        partials[c] = acc;
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nw = static_cast<unsigned>(std::clamp<int>(threads, 1, static_cast<int>(4 * hw)));
    if (nw <= 1 || nchunks <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (unsigned w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (std::size_t c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1))
                    run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }
    return pairwise_combine(std::move(partials));
}

// parallel for over rows with no reduction (map evaluation etc.); the work
// itself must write to disjoint locations.
template <class Fn>
void parallel_rows_for(std::size_t nrows, int threads, Fn&& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nw = static_cast<unsigned>(std::clamp<int>(threads, 1, static_cast<int>(4 * hw)));
    if (nw <= 1 || nrows <= 1) {
        for (std::size_t r = 0; r < nrows; ++r) fn(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (std::size_t r = next.fetch_add(1); r < nrows; r = next.fetch_add(1)) fn(r);
        });
    for (auto& th : pool) th.join();
}

}  // namespace tp2a
