#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace abscat::cli::detail {

//! Runs fn(0..n-1), on worker threads when `concurrent`. Every index runs;
//! the failure with the lowest index is returned so that error reports do
//! not depend on scheduling.
inline std::optional<std::pair<int, std::exception_ptr>>
parallel_for(int n, bool concurrent, const std::function<void(int)>& fn)
{
    std::optional<std::pair<int, std::exception_ptr>> first;
    std::mutex lock;
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            }
            catch (...) {
                std::lock_guard guard(lock);
                if (!first || i < first->first) {
                    first = {i, std::current_exception()};
                }
            }
        }
    };
    const int threads = concurrent ? std::min<int>(n, std::max(1u, std::thread::hardware_concurrency())) : 1;
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    return first;
}

} // namespace abscat::cli::detail
