#pragma once

#include <cstdlib>
#include <future>
#include <thread>
#include <vector>

namespace structid {

/// Worker cap for embarrassingly parallel loops; STRUCTID_THREADS overrides
/// the hardware default, and 1 disables threading entirely.
inline unsigned worker_cap() {
    if (const char* env = std::getenv("STRUCTID_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n); results must not depend on execution order.
template <typename Fn>
void parallel_for_each(size_t n, Fn&& fn) {
    unsigned cap = worker_cap();
    if (n <= 1 || cap <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> tasks;
    tasks.reserve(n);
    for (size_t i = 0; i < n; ++i)
        tasks.push_back(std::async(std::launch::async, [&fn, i] { fn(i); }));
    for (auto& t : tasks) t.get();
}

} // namespace structid
