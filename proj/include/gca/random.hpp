#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace gca {

using Rng = std::mt19937_64;

/// Engine for replicate `index` of an experiment keyed by `master_seed`.
/// Depends only on the pair, never on scheduling order.
inline Rng replicate_rng(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
    return Rng(seq);
}

/// Seed value for replicate `index`, for APIs that take a seed rather than an engine.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t index) {
    Rng rng = replicate_rng(master_seed, index);
    return rng();
}

/**
 * Evaluates fn(i) for i in [0, count) on up to hardware_concurrency threads.
 * Results land at their index, so the output is identical for any thread count.
 * The first exception thrown by `fn` (lowest index) is rethrown after all workers join.
 */
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn fn) {
    std::vector<T> out(count);
    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

/// Linear-interpolation quantile (type 7) of an already sorted sample.
inline double sorted_quantile(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) return 0.0;
    const double h = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace gca
