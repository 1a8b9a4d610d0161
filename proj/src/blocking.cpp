#include "rfo/blocking.hpp"

#include <algorithm>
#include <cmath>

namespace rfo {

namespace {

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0;
    double mean = 0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (const double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
}

} // namespace

BlockingResult blocking_analysis(const std::vector<double>& series) {
    BlockingResult r;
    r.samples = series.size();
    if (series.empty()) return r;
    double mean = 0;
    for (const double x : series) mean += x;
    r.mean = mean / static_cast<double>(series.size());
    r.stderr_naive = stderr_of(series);

    // double the block size while at least 32 blocks remain; the error bar is
    // the largest estimate across levels (plateau-or-above rule)
    std::vector<double> blocks = series;
    r.stderr_blocked = r.stderr_naive;
    while (blocks.size() >= 64) {
        std::vector<double> next(blocks.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = 0.5 * (blocks[2 * i] + blocks[2 * i + 1]);
        blocks = std::move(next);
        r.levels += 1;
        r.stderr_blocked = std::max(r.stderr_blocked, stderr_of(blocks));
    }
    return r;
}

} // namespace rfo
