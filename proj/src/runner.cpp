#include "repqec/runner.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace repqec {

std::vector<double> run_parallel(uint64_t samples, int workers,
                                 const std::function<double(uint64_t)>& fn) {
    return run_parallel_t<double>(samples, workers, fn);
}

MeanStderr mean_stderr(const std::vector<double>& values) {
    MeanStderr r;
    if (values.empty()) return r;
    double sum = 0.0;
    for (double v : values) sum += v;
    r.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return r;
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    double var = ss / static_cast<double>(values.size() - 1);
    r.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
    return r;
}

}  // namespace repqec
