#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace msqi {

/// Number of worker threads: hardware default, capped by the MSQI_THREADS
/// environment variable when set.
inline unsigned thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* cap = std::getenv("MSQI_THREADS")) {
        unsigned c = static_cast<unsigned>(std::strtoul(cap, nullptr, 10));
        if (c >= 1) n = std::min(n, c);
    }
    return n;
}

/// Runs fn(i) for i in [0, n). Each index is processed exactly once; output
/// written per-index is deterministic regardless of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = thread_count();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr err;
    std::mutex err_mu;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                // static block partition keeps cache locality for grid sweeps
                std::size_t lo = n * t / threads;
                std::size_t hi = n * (t + 1) / threads;
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace msqi
