#pragma once

// Blocking (block-doubling) error bars for correlated Monte Carlo series.

#include <vector>

namespace rfo {

struct BlockingResult {
    double mean = 0;
    double stderr_naive = 0; // no autocorrelation correction
    double stderr_blocked = 0;
    int levels = 0;
    std::size_t samples = 0;
};

BlockingResult blocking_analysis(const std::vector<double>& series);

} // namespace rfo
