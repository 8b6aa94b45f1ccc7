#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rankaudit {

// Runs fn(0..count-1) over at most `concurrency` threads and returns results
// in slot order. fn must not throw; carry failures inside T.
template <typename T, typename Fn>
std::vector<T> parallel_map_ordered(std::size_t count, int concurrency, Fn&& fn) {
    std::vector<T> results(count);
    if (count == 0) return results;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(concurrency, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= count) break;
                results[i] = fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace rankaudit
