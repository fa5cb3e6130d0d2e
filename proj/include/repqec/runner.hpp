#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace repqec {

/// Runs fn(sample_index) for sample_index = 0..samples-1 over `workers`
/// threads and returns the per-sample values in index order, so that any
/// reduction over them is independent of the worker count.
template <typename T, typename F>
std::vector<T> run_parallel_t(uint64_t samples, int workers, F&& fn) {
    std::vector<T> values(samples);
    if (workers <= 1) {
        for (uint64_t k = 0; k < samples; ++k) values[k] = fn(k);
        return values;
    }
    std::atomic<uint64_t> next{0};
    auto work = [&]() {
        for (;;) {
            uint64_t k = next.fetch_add(64);
            if (k >= samples) return;
            uint64_t end = std::min(samples, k + 64);
            for (; k < end; ++k) values[k] = fn(k);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return values;
}

std::vector<double> run_parallel(uint64_t samples, int workers,
                                 const std::function<double(uint64_t)>& fn);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& values);

}  // namespace repqec
