#pragma once

// Mean-field spin dynamics: N Bloch vectors precessing in the disorder field
// Omega_i and the interaction-generated transverse field, integrated with
// fixed-step RK4. Tracks the collective coherence eta(t) = r(t)^2.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "supercoh/disorder.hpp"
#include "supercoh/network.hpp"

namespace supercoh {

// Product-state ensemble; every Bloch vector has length r0 and stays there
// under the dynamics (purity conservation).
struct BlochEnsemble {
    std::vector<double> x, y, z;
    double r0 = 1.0;

    std::size_t size() const noexcept { return x.size(); }
};

// All vectors at (r0 sin(theta0) cos(phi0), r0 sin(theta0) sin(phi0), -r0 cos(theta0)).
BlochEnsemble init_coherent(std::size_t n, double r0, double theta0, double phi0 = 0.0);

struct CollectiveField {
    double r;    // |N^-1 sum_j (x_j - i y_j)|; eta = r^2
    double psi;  // arg of the same sum
};

CollectiveField collective_field(const BlochEnsemble& ensemble) noexcept;

struct TraceMeta {
    std::size_t n = 0;
    double sigma = 0.0;
    std::string dist;
    std::string geometry;
    double theta0 = 0.0;
    double r0 = 1.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string scheme;
};

struct CoherenceTrace {
    std::vector<double> times;  // constant spacing dt * record_stride
    std::vector<double> eta;
    TraceMeta meta;
};

struct IntegrationParams {
    double t_max = 200.0;
    double dt = 0.01;
    std::size_t record_stride = 1;
    // |Bloch length - r0| beyond this aborts with NumericalBlowup
    double blowup_tolerance = 1e-3;
};

// Dedicated all-to-all coupling: the local field needs only the running sums,
// so a step costs O(N) instead of a sparse matrix-vector product.
struct MeanFieldAllToAll {
    std::size_t n;
    Sign sign = Sign::Attractive;
};

CoherenceTrace integrate(const BlochEnsemble& initial, const DisorderRealization& realization,
                         const MeanFieldAllToAll& coupling, const IntegrationParams& params);
CoherenceTrace integrate(const BlochEnsemble& initial, const DisorderRealization& realization,
                         const InteractionNetwork& net, const IntegrationParams& params);

// Trapezoidal mean of eta over [t_transient, end of trace].
double time_average(const CoherenceTrace& trace, double t_transient);

// Mean spacing between successive local maxima after the transient, with peak
// prominence >= prominence_fraction * max(eta). Empty when fewer than 2 peaks.
std::optional<double> oscillation_period(const CoherenceTrace& trace, double t_transient,
                                         double prominence_fraction = 1e-3);

// Number of such maxima; the sweep layer uses it to decide near-critical reruns.
std::size_t count_oscillation_peaks(const CoherenceTrace& trace, double t_transient,
                                    double prominence_fraction = 1e-3);

// Mean-field constants of motion, used by the conservation test suite.
double total_sz(const BlochEnsemble& ensemble) noexcept;
double meanfield_energy(const BlochEnsemble& ensemble, const DisorderRealization& realization,
                        const InteractionNetwork& net);
// Final ensemble state after integration (for conservation checks).
BlochEnsemble integrate_final_state(const BlochEnsemble& initial,
                                    const DisorderRealization& realization,
                                    const InteractionNetwork& net, const IntegrationParams& params);

}  // namespace supercoh
