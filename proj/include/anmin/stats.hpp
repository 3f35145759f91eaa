#pragma once

#include <cstddef>
#include <span>

namespace anmin {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n − 1); 0 for n = 1
    std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

struct PairedTTest {
    std::size_t n = 0;
    double mean_diff = 0.0;  // mean of a − b
    double sd_diff = 0.0;
    double t = 0.0;
    double p_value = 1.0;  // two-sided
    bool significant = false;
    // Zero spread in the differences: t is 0 (p = 1) when the mean difference
    // is 0 and ±∞ (p = 0) otherwise.
    bool zero_variance = false;
};

/// Paired t-test on a − b. Significance is p < `level` (default 0.01).
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b, double level = 0.01);

}  // namespace anmin
