#include "parcs/distributions.hpp"

#include <array>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "parcs/errors.hpp"

namespace parcs {

namespace {

const std::array<std::vector<std::string>, 8> kParamNames = {{
    {"p"},            // bernoulli
    {"mu", "sigma"},  // normal
    {"low", "high"},  // uniform
    {"rate"},         // exponential
    {"mu", "sigma"},  // lognormal
    {"lambda"},       // poisson
    {"mu", "rate"},   // logexp
    {"value"},        // deterministic
}};

constexpr std::array<std::string_view, 8> kKindNames = {
    "bernoulli", "normal",  "uniform", "exponential",
    "lognormal", "poisson", "logexp",  "deterministic",
};

double probit(double u) {
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::quantile(unit, u);
}

// smallest k with Pois(lambda) CDF >= u; per-term pmf through lgamma so a
// large lambda cannot underflow the whole scan
double poisson_icdf(double lambda, double u) {
    constexpr std::size_t kMaxTerms = 1000000;
    const double log_lambda = std::log(lambda);
    double cdf = 0.0;
    for (std::size_t k = 0; k < kMaxTerms; ++k) {
        const double kd = static_cast<double>(k);
        cdf += std::exp(kd * log_lambda - lambda - std::lgamma(kd + 1.0));
        if (cdf >= u) return kd;
    }
    return static_cast<double>(kMaxTerms);
}

[[noreturn]] void bad_param(DistKind kind, std::size_t index, double value) {
    throw InvalidParameter(std::string(dist_kind_name(kind)) + ": parameter '" +
                           dist_param_names(kind)[index] + "' = " + std::to_string(value) +
                           " outside its valid range");
}

} // namespace

const std::vector<std::string>& dist_param_names(DistKind kind) {
    return kParamNames[static_cast<std::size_t>(kind)];
}

std::size_t dist_param_count(DistKind kind) { return dist_param_names(kind).size(); }

std::string_view dist_kind_name(DistKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

bool dist_kind_from_name(std::string_view name, DistKind& out) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) {
            out = static_cast<DistKind>(i);
            return true;
        }
    }
    return false;
}

DType default_dtype(DistKind kind) {
    switch (kind) {
    case DistKind::bernoulli: return DType::binary;
    case DistKind::poisson: return DType::count;
    default: return DType::continuous;
    }
}

bool ParamRange::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

bool ParamRange::contains(double v) const {
    if (open_lo ? !(v > lo) : !(v >= lo)) return false;
    if (open_hi ? !(v < hi) : !(v <= hi)) return false;
    return true;
}

ParamRange dist_param_range(DistKind kind, std::size_t param_index) {
    const ParamRange all{};                                // (-inf, inf)
    const ParamRange positive{0.0, all.hi, true, false};   // (0, inf)
    const ParamRange nonneg{0.0, all.hi, false, false};    // [0, inf)
    switch (kind) {
    case DistKind::bernoulli: return {0.0, 1.0, true, true};
    case DistKind::normal:
    case DistKind::lognormal: return param_index == 0 ? all : nonneg;
    case DistKind::uniform: return all; // joint low < high checked at sampling
    case DistKind::exponential:
    case DistKind::poisson: return positive;
    case DistKind::logexp: return param_index == 0 ? all : positive;
    case DistKind::deterministic: return all;
    }
    return all;
}

std::optional<std::size_t> dist_constrained_param(DistKind kind) {
    switch (kind) {
    case DistKind::bernoulli:
    case DistKind::exponential:
    case DistKind::poisson: return 0;
    case DistKind::normal:
    case DistKind::lognormal:
    case DistKind::logexp: return 1;
    default: return std::nullopt;
    }
}

double icdf_sample(DistKind kind, std::span<const double> theta, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw InvalidParameter("error value " + std::to_string(epsilon) +
                               " outside the open interval (0,1)");
    if (theta.size() != dist_param_count(kind))
        throw InvalidParameter(std::string(dist_kind_name(kind)) + ": expected " +
                               std::to_string(dist_param_count(kind)) + " parameters, got " +
                               std::to_string(theta.size()));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta[i]) || !dist_param_range(kind, i).contains(theta[i]))
            bad_param(kind, i, theta[i]);
    }

    switch (kind) {
    case DistKind::bernoulli:
        return epsilon <= 1.0 - theta[0] ? 0.0 : 1.0;
    case DistKind::normal:
        return theta[1] == 0.0 ? theta[0] : theta[0] + theta[1] * probit(epsilon);
    case DistKind::uniform:
        if (!(theta[0] < theta[1])) throw InvalidParameter("uniform: low must be < high");
        return theta[0] + epsilon * (theta[1] - theta[0]);
    case DistKind::exponential:
        return -std::log1p(-epsilon) / theta[0];
    case DistKind::lognormal:
        return std::exp(theta[1] == 0.0 ? theta[0] : theta[0] + theta[1] * probit(epsilon));
    case DistKind::poisson:
        return poisson_icdf(theta[0], epsilon);
    case DistKind::logexp:
        return theta[0] + std::log(-std::log1p(-epsilon) / theta[1]);
    case DistKind::deterministic:
        return theta[0];
    }
    throw InvalidParameter("unknown distribution kind");
}

} // namespace parcs
