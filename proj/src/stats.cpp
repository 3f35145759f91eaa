#include "anmin/stats.hpp"

#include "anmin/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace anmin {

MeanStd mean_std(std::span<const double> values) {
    MeanStd r;
    r.n = values.size();
    if (r.n == 0) return r;
    double sum = 0.0;
    for (double v : values) sum += v;
    r.mean = sum / static_cast<double>(r.n);
    if (r.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - r.mean) * (v - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(r.n - 1));
    }
    return r;
}

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b, double level) {
    if (a.size() != b.size()) throw UnpairedRuns("paired t-test needs equally many runs per method");
    if (a.size() < 2) throw UnpairedRuns("paired t-test needs at least two pairs");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const MeanStd ms = mean_std(diff);

    PairedTTest r;
    r.n = ms.n;
    r.mean_diff = ms.mean;
    r.sd_diff = ms.std;
    if (ms.std == 0.0) {
        r.zero_variance = true;
        if (ms.mean == 0.0) {
            r.t = 0.0;
            r.p_value = 1.0;
        } else {
            r.t = std::copysign(std::numeric_limits<double>::infinity(), ms.mean);
            r.p_value = 0.0;
        }
    } else {
        r.t = ms.mean / (ms.std / std::sqrt(static_cast<double>(ms.n)));
        const boost::math::students_t dist(static_cast<double>(ms.n - 1));
        r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    }
    r.significant = r.p_value < level;
    return r;
}

}  // namespace anmin
