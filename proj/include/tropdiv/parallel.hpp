#pragma once

/**
 * @file parallel.hpp
 * @brief Static-chunked parallel loop used for independent per-item work.
 */

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tropdiv {

/// Runs fn(i) for i in [0, n) on at most `jobs` threads.  jobs <= 1 runs inline.
/// The first exception thrown by any item is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn)
{
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(jobs, n);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w)
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace tropdiv
