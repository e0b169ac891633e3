#pragma once

#include <optional>
#include <span>

namespace parcs {

// Sigmoid squeeze of a raw parameter into (L, U), with an offset O that an
// instantiation pass calibrates so the parameter's burn-in mean hits
// target_mean.  Without a target mean the offset stays 0 and no burn-in is
// needed for this correction.
struct NodeCorrection {
    double lower = 0.0;
    double upper = 1.0;
    std::optional<double> target_mean; // must lie strictly inside (lower, upper)
    double offset = 0.0;               // written at calibration
    bool frozen = false;               // true once the offset has been calibrated

    bool operator==(const NodeCorrection&) const = default;
};

// (U - L) / (1 + exp(-theta + O)) + L, clamped to stay strictly inside (L, U)
// even where the exponential saturates in double precision.
double node_correction(double theta_raw, const NodeCorrection& c);

// Bisection for the offset O in [-700, 700] such that the mean of the
// corrected samples equals target_mean; the map O -> mean is strictly
// decreasing.  Throws NonBracketable when no root lies inside the interval.
double calibrate_offset(std::span<const double> raw_samples, double target_mean,
                        double lower, double upper);

// Standardization of an edge's transmitted values by moments frozen at
// instantiation, detaching downstream parameters from raw parent scale.
struct EdgeCorrection {
    bool enabled = false;
    bool frozen = false;
    double mu = 0.0;
    double sigma = 1.0; // > 0 once frozen

    bool operator==(const EdgeCorrection&) const = default;
};

// (z - mu) / sigma; requires a frozen correction
double apply_edge_correction(double z, const EdgeCorrection& c);

struct Moments {
    double mu = 0.0;
    double sigma = 0.0; // population std (1/n)
};

// Mean and population standard deviation; throws DegenerateSample for fewer
// than two samples or an all-equal batch.
Moments estimate_moments(std::span<const double> samples);

} // namespace parcs
