#pragma once

// Frequency-disorder distributions p_sigma, disorder realizations Omega_i with
// the zero-mean convention, and the non-interacting analytic decay baseline.

#include <cstdint>
#include <string>
#include <vector>

#include "supercoh/errors.hpp"

namespace supercoh {

enum class DistFamily { Uniform, Gaussian, Lorentzian };

const char* to_string(DistFamily family) noexcept;
DistFamily dist_family_from_string(const std::string& name);

// sigma is the standard deviation for Uniform/Gaussian and the HWHM scale for
// Lorentzian (whose variance does not exist). Uniform support is [-sqrt(3)sigma, +sqrt(3)sigma].
struct FrequencyDistribution {
    DistFamily family = DistFamily::Uniform;
    double sigma = 0.2;

    FrequencyDistribution() = default;
    FrequencyDistribution(DistFamily f, double s);

    double pdf(double omega) const noexcept;
    // Inverse CDF on (0,1); shared by stratified placement and IID inverse-transform draws.
    double quantile(double u) const;
    // Half width of the support (finite only for Uniform).
    double support_halfwidth() const noexcept;
};

enum class SamplingScheme { IID, Stratified };

const char* to_string(SamplingScheme scheme) noexcept;
SamplingScheme scheme_from_string(const std::string& name);

struct DisorderRealization {
    std::vector<double> omegas;  // recentered: sum is zero
    FrequencyDistribution distribution;
    SamplingScheme scheme = SamplingScheme::Stratified;
    std::uint64_t seed = 0;  // meaningful for IID only

    std::size_t size() const noexcept { return omegas.size(); }
};

// Stratified: Omega_i = Q((i-1/2)/n), sorted ascending. IID: n inverse-transform
// pseudo-random draws keyed by seed. Both are recentered to exact zero mean.
DisorderRealization sample(const FrequencyDistribution& dist, std::size_t n,
                           SamplingScheme scheme, std::uint64_t seed = 0);

// Non-interacting coherence eta(t) = eta0 |phi_p(t)|^2 with phi_p the
// characteristic function of p_sigma.
double free_decay(const FrequencyDistribution& dist, double eta0, double t);

}  // namespace supercoh
