#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace heavytail {

// Worker count: HEAVYTAIL_WORKERS env var, else hardware concurrency.
inline int default_workers() {
    if (const char* env = std::getenv("HEAVYTAIL_WORKERS")) {
        int v = std::atoi(env);
        if (v >= 1) return std::min(v, 64);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// Runs f(i) for i in [0, n). Work items must be independent; results keyed
// by index so the outcome does not depend on scheduling.
template <class F>
void parallel_for(int n, int workers, F&& f) {
    if (n <= 0) return;
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    f(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace heavytail
