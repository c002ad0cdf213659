// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mcfar {

inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end, worker) over contiguous blocks of [0, count).
/// The first exception thrown by any worker is rethrown on the caller.
template <typename Body>
void parallel_blocks(std::size_t count, unsigned workers, Body&& body) {
    workers = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        body(std::size_t{0}, count, 0u);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        threads.emplace_back([&, begin, end, w] {
            try {
                body(begin, end, w);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Evaluates fn(i) for every i in [0, count); results land at index i
/// regardless of which worker computed them.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, unsigned workers, Fn&& fn) {
    std::vector<T> out(count);
    parallel_blocks(count, workers, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
    });
    return out;
}

}  // namespace mcfar
