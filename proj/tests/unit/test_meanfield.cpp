#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "supercoh/consistency.hpp"
#include "supercoh/meanfield.hpp"

using namespace supercoh;

namespace {
constexpr double kPi = std::numbers::pi;

CoherenceTrace synthetic_trace(double t_max, double dt,
                               const std::function<double(double)>& f) {
    CoherenceTrace trace;
    for (double t = 0.0; t <= t_max + 1e-12; t += dt) {
        trace.times.push_back(t);
        trace.eta.push_back(f(t));
    }
    return trace;
}
}  // namespace

TEST_CASE("coherent initialization") {
    auto eq = init_coherent(10, 1.0, kPi / 2.0, 0.0);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(eq.x[i] == doctest::Approx(1.0));
        CHECK(eq.y[i] == doctest::Approx(0.0));
        CHECK(eq.z[i] == doctest::Approx(0.0));
    }
    CHECK(collective_field(eq).r == doctest::Approx(1.0));

    auto ground = init_coherent(4, 1.0, 0.0, 0.0);
    CHECK(ground.z[0] == doctest::Approx(-1.0));  // minus sign convention at the pole
    CHECK(collective_field(ground).r == doctest::Approx(0.0));

    CHECK_THROWS_AS(init_coherent(4, 1.5, 0.1, 0.0), ValidationError);
    CHECK_THROWS_AS(init_coherent(4, 0.5, 4.0, 0.0), ValidationError);
}

TEST_CASE("collective field cancellation") {
    BlochEnsemble ens;
    ens.r0 = 1.0;
    ens.x = {1.0, -1.0};
    ens.y = {0.0, 0.0};
    ens.z = {0.0, 0.0};
    CHECK(collective_field(ens).r == doctest::Approx(0.0));
}

TEST_CASE("zero disorder is a fixed point at the equator") {
    const std::size_t n = 64;
    FrequencyDistribution dist(DistFamily::Uniform, 1e-30);
    DisorderRealization real;
    real.distribution = dist;
    real.omegas.assign(n, 0.0);
    IntegrationParams params;
    params.t_max = 50.0;
    auto trace = integrate(init_coherent(n, 1.0, kPi / 2.0), real,
                           MeanFieldAllToAll{n, Sign::Attractive}, params);
    for (double eta : trace.eta) CHECK(eta == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("time average basics") {
    auto constant = synthetic_trace(10.0, 0.1, [](double) { return 0.37; });
    CHECK(time_average(constant, 2.0) == doctest::Approx(0.37).epsilon(1e-12));

    auto cos2 = synthetic_trace(200.0, 0.01, [](double t) { return std::cos(t) * std::cos(t); });
    CHECK(time_average(cos2, 0.0) == doctest::Approx(0.5).epsilon(1.0 / 200.0));

    CHECK_THROWS_AS(time_average(constant, 11.0), ValidationError);
}

TEST_CASE("oscillation period detection") {
    auto constant = synthetic_trace(100.0, 0.01, [](double) { return 0.5; });
    CHECK_FALSE(oscillation_period(constant, 0.0).has_value());

    auto wave = synthetic_trace(100.0, 0.01, [](double t) {
        return 0.5 + 0.1 * std::cos(2.0 * kPi * t / 5.0);
    });
    auto period = oscillation_period(wave, 3.0);
    REQUIRE(period.has_value());
    CHECK(*period == doctest::Approx(5.0).epsilon(0.01 / 5.0 * 3));
    CHECK(count_oscillation_peaks(wave, 3.0) >= 18);
}

// Table 1 anchor: at sigma = 0.5 the integrator's eta-bar lands on the
// uniform closed form 3 sigma^2 cot^2(sqrt(3) sigma).
TEST_CASE("all-to-all eta-bar matches the uniform closed form at sigma 0.5") {
    const std::size_t n = 1000;
    auto real = sample(FrequencyDistribution(DistFamily::Uniform, 0.5), n,
                       SamplingScheme::Stratified);
    IntegrationParams params;
    params.t_max = 200.0;
    auto trace = integrate(init_coherent(n, 1.0, kPi / 2.0), real,
                           MeanFieldAllToAll{n, Sign::Attractive}, params);
    const double eta_bar = time_average(trace, 50.0);
    const double closed = table1_closed_forms(DistFamily::Uniform, 0.5, kPi / 2.0, 1.0).eta_bar;
    CHECK(eta_bar == doctest::Approx(closed).epsilon(0.03));
}

TEST_CASE("decohered run averages to nearly zero") {
    const std::size_t n = 1000;
    auto real = sample(FrequencyDistribution(DistFamily::Uniform, 1.5), n,
                       SamplingScheme::Stratified);
    IntegrationParams params;
    params.t_max = 200.0;
    auto trace = integrate(init_coherent(n, 1.0, kPi / 2.0), real,
                           MeanFieldAllToAll{n, Sign::Attractive}, params);
    CHECK(time_average(trace, 50.0) < 0.02);
}

TEST_CASE("oscillation period grows toward the critical point") {
    const std::size_t n = 1000;
    IntegrationParams params;
    params.t_max = 400.0;
    double previous = 0.0;
    for (double sigma : {0.5, 0.85}) {
        auto real = sample(FrequencyDistribution(DistFamily::Uniform, sigma), n,
                           SamplingScheme::Stratified);
        auto trace = integrate(init_coherent(n, 1.0, kPi / 2.0), real,
                               MeanFieldAllToAll{n, Sign::Attractive}, params);
        auto period = oscillation_period(trace, 50.0);
        REQUIRE(period.has_value());
        CHECK(*period > previous);
        previous = *period;
    }
}

TEST_CASE("general sparse path reduces to the all-to-all fast path") {
    const std::size_t n = 200;
    auto real = sample(FrequencyDistribution(DistFamily::Uniform, 0.4), n,
                       SamplingScheme::Stratified);
    auto net = InteractionNetwork::all_to_all(n);
    IntegrationParams params;
    params.t_max = 50.0;
    auto ens = init_coherent(n, 1.0, kPi / 2.0);
    auto fast = integrate(ens, real, MeanFieldAllToAll{n, Sign::Attractive}, params);
    auto general = integrate(ens, real, net, params);
    REQUIRE(fast.eta.size() == general.eta.size());
    for (std::size_t i = 0; i < fast.eta.size(); ++i) {
        CHECK(std::abs(fast.eta[i] - general.eta[i]) < 1e-8);
    }
}

TEST_CASE("sign inversion with mirrored disorder reproduces the trace") {
    const std::size_t n = 150;
    auto real = sample(FrequencyDistribution(DistFamily::Gaussian, 0.5), n,
                       SamplingScheme::IID, 4);
    DisorderRealization mirrored = real;
    for (double& w : mirrored.omegas) w = -w;

    auto attract = InteractionNetwork::watts_strogatz(n, 4, 0.3, 8, Sign::Attractive);
    auto repulse = InteractionNetwork::watts_strogatz(n, 4, 0.3, 8, Sign::Repulsive);

    IntegrationParams params;
    params.t_max = 60.0;
    auto ens = init_coherent(n, 0.9, 1.0);
    auto a = integrate(ens, real, attract, params);
    auto b = integrate(ens, mirrored, repulse, params);
    for (std::size_t i = 0; i < a.eta.size(); ++i) {
        CHECK(std::abs(a.eta[i] - b.eta[i]) < 1e-9);
    }
}

// Conservation suite on randomized instances: purity, total z, mean-field
// energy, all along a general-network trajectory.
TEST_CASE("mean-field conservation laws on random instances") {
    std::mt19937_64 gen(5150);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 40 + gen() % 60;
        const double sigma = 0.2 + 0.8 * std::uniform_real_distribution<>(0, 1)(gen);
        const double theta0 = 0.3 + 2.4 * std::uniform_real_distribution<>(0, 1)(gen);
        const double r0 = 0.3 + 0.7 * std::uniform_real_distribution<>(0, 1)(gen);
        auto real = sample(FrequencyDistribution(DistFamily::Uniform, sigma), n,
                           SamplingScheme::IID, gen());
        auto net = InteractionNetwork::erdos_renyi(n, 0.2, gen());

        auto initial = init_coherent(n, r0, theta0, 0.3);
        IntegrationParams params;
        params.t_max = 200.0;
        auto final_state = integrate_final_state(initial, real, net, params);

        // purity
        for (std::size_t i = 0; i < n; ++i) {
            const double len = std::sqrt(final_state.x[i] * final_state.x[i] +
                                         final_state.y[i] * final_state.y[i] +
                                         final_state.z[i] * final_state.z[i]);
            CHECK(std::abs(len - r0) < 1e-6);
        }
        // U(1): total z component
        CHECK(std::abs(total_sz(final_state) - total_sz(initial)) < 1e-6);
        // energy
        const double e0 = meanfield_energy(initial, real, net);
        const double e1 = meanfield_energy(final_state, real, net);
        CHECK(std::abs(e1 - e0) < 1e-5 * std::max(1.0, std::abs(e0)));
    }
}

TEST_CASE("integrate validates sizes") {
    auto real = sample(FrequencyDistribution(DistFamily::Uniform, 0.5), 10,
                       SamplingScheme::Stratified);
    auto ens = init_coherent(11, 1.0, 1.0);
    CHECK_THROWS_AS(integrate(ens, real, MeanFieldAllToAll{11, Sign::Attractive}, {}),
                    ValidationError);
}
