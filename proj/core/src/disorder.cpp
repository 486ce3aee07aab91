#include "supercoh/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "supercoh/rng.hpp"

namespace supercoh {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
}

const char* to_string(DistFamily family) noexcept {
    switch (family) {
        case DistFamily::Uniform: return "uniform";
        case DistFamily::Gaussian: return "gaussian";
        case DistFamily::Lorentzian: return "lorentz";
    }
    return "?";
}

DistFamily dist_family_from_string(const std::string& name) {
    if (name == "uniform") return DistFamily::Uniform;
    if (name == "gaussian" || name == "gauss") return DistFamily::Gaussian;
    if (name == "lorentz" || name == "lorentzian" || name == "cauchy") return DistFamily::Lorentzian;
    throw ValidationError("unknown distribution family: " + name);
}

const char* to_string(SamplingScheme scheme) noexcept {
    return scheme == SamplingScheme::IID ? "iid" : "stratified";
}

SamplingScheme scheme_from_string(const std::string& name) {
    if (name == "iid") return SamplingScheme::IID;
    if (name == "stratified") return SamplingScheme::Stratified;
    throw ValidationError("unknown sampling scheme: " + name);
}

FrequencyDistribution::FrequencyDistribution(DistFamily f, double s) : family(f), sigma(s) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw ValidationError("disorder strength sigma must be positive and finite");
    }
}

double FrequencyDistribution::pdf(double omega) const noexcept {
    switch (family) {
        case DistFamily::Uniform: {
            const double w = kSqrt3 * sigma;
            return std::abs(omega) <= w ? 1.0 / (2.0 * w) : 0.0;
        }
        case DistFamily::Gaussian: {
            const double u = omega / sigma;
            return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        }
        case DistFamily::Lorentzian:
            return (sigma / std::numbers::pi) / (omega * omega + sigma * sigma);
    }
    return 0.0;
}

double FrequencyDistribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("quantile argument must lie in (0,1)");
    switch (family) {
        case DistFamily::Uniform:
            return kSqrt3 * sigma * (2.0 * u - 1.0);
        case DistFamily::Gaussian:
            return sigma * std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
        case DistFamily::Lorentzian:
            return sigma * std::tan(std::numbers::pi * (u - 0.5));
    }
    return 0.0;
}

double FrequencyDistribution::support_halfwidth() const noexcept {
    return family == DistFamily::Uniform ? kSqrt3 * sigma
                                         : std::numeric_limits<double>::infinity();
}

namespace {

// Shift to exact zero mean; a second pass removes the residual of the first.
void recenter(std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass) {
        long double sum = 0.0L;
        for (double x : v) sum += x;
        const double mean = static_cast<double>(sum / static_cast<long double>(v.size()));
        for (double& x : v) x -= mean;
    }
}

}  // namespace

DisorderRealization sample(const FrequencyDistribution& dist, std::size_t n,
                           SamplingScheme scheme, std::uint64_t seed) {
    if (n < 2) throw ValidationError("disorder realization needs n >= 2");

    DisorderRealization out;
    out.distribution = dist;
    out.scheme = scheme;
    out.seed = seed;
    out.omegas.resize(n);

    if (scheme == SamplingScheme::Stratified) {
        for (std::size_t i = 0; i < n; ++i) {
            out.omegas[i] = dist.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
        }
    } else {
        auto gen = make_engine(derive_seed(seed));
        for (std::size_t i = 0; i < n; ++i) out.omegas[i] = dist.quantile(uniform01(gen));
    }
    recenter(out.omegas);
    return out;
}

double free_decay(const FrequencyDistribution& dist, double eta0, double t) {
    if (t < 0.0) throw ValidationError("free_decay requires t >= 0");
    switch (dist.family) {
        case DistFamily::Uniform: {
            const double x = kSqrt3 * dist.sigma * t;
            const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
            return eta0 * sinc * sinc;
        }
        case DistFamily::Gaussian: {
            const double st = dist.sigma * t;
            return eta0 * std::exp(-st * st);
        }
        case DistFamily::Lorentzian:
            return eta0 * std::exp(-2.0 * dist.sigma * t);
    }
    return eta0;
}

}  // namespace supercoh
