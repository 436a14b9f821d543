#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace mvi {

// Pairwise (cascade) summation with a fixed recursion structure: the result
// depends only on the data, never on thread count, and rounding error grows
// like O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> v) noexcept {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean_of(std::span<const double> v) noexcept {
    return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

// Sample mean and standard error (sd / sqrt(n)), deterministic order.
struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(std::span<const double> v) {
    MeanStderr out;
    const std::size_t n = v.size();
    if (n == 0) return out;
    out.mean = mean_of(v);
    if (n < 2) return out;
    double ss = 0.0;
    for (double x : v) {
        const double d = x - out.mean;
        ss += d * d;
    }
    out.stderr_ = std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
    return out;
}

} // namespace mvi
