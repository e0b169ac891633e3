#include "parcs/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parcs/errors.hpp"

namespace parcs {

double node_correction(double theta_raw, const NodeCorrection& c) {
    if (!(c.lower < c.upper))
        throw InvalidParameter("correction bounds must satisfy lower < upper");
    double v = (c.upper - c.lower) / (1.0 + std::exp(-theta_raw + c.offset)) + c.lower;
    // the exponential saturates in double precision; keep the contract that
    // output stays strictly inside (lower, upper) for every finite input
    if (v <= c.lower) v = std::nextafter(c.lower, c.upper);
    if (v >= c.upper) v = std::nextafter(c.upper, c.lower);
    return v;
}

double calibrate_offset(std::span<const double> raw_samples, double target_mean,
                        double lower, double upper) {
    if (!(lower < upper))
        throw InvalidParameter("correction bounds must satisfy lower < upper");
    if (!(target_mean > lower && target_mean < upper))
        throw InvalidParameter("target mean " + std::to_string(target_mean) +
                               " must lie strictly inside (lower, upper)");
    if (raw_samples.empty())
        throw DegenerateSample("offset calibration needs at least one sample");

    const auto mean_at = [&](double offset) {
        NodeCorrection c{lower, upper, std::nullopt, offset};
        double s = 0.0;
        for (double t : raw_samples) s += node_correction(t, c);
        return s / static_cast<double>(raw_samples.size());
    };

    // mean is strictly decreasing in the offset
    double lo = -700.0, hi = 700.0;
    if (target_mean > mean_at(lo) || target_mean < mean_at(hi))
        throw NonBracketable("target mean " + std::to_string(target_mean) +
                             " not reachable with an offset in [-700, 700]");

    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mean_at(mid) >= target_mean)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double apply_edge_correction(double z, const EdgeCorrection& c) {
    if (!c.enabled || !c.frozen)
        throw NotCalibrated("edge correction applied before its moments were frozen");
    if (!(c.sigma > 0.0))
        throw InvalidParameter("frozen edge correction must have sigma > 0");
    return (z - c.mu) / c.sigma;
}

Moments estimate_moments(std::span<const double> samples) {
    if (samples.size() < 2)
        throw DegenerateSample("moment estimation needs at least two samples");
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    if (*mn == *mx)
        throw DegenerateSample("all samples equal; standardization undefined");

    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());

    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(samples.size()))};
}

} // namespace parcs
