#include <doctest.h>

#include <cmath>
#include <numbers>

#include "supercoh/disorder.hpp"
#include "supercoh/meanfield.hpp"
#include "supercoh/network.hpp"

using namespace supercoh;

TEST_CASE("pdf values") {
    // uniform height = 1/width
    FrequencyDistribution uni(DistFamily::Uniform, 0.5);
    CHECK(uni.pdf(0.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0) * 0.5)).epsilon(1e-12));
    CHECK(uni.pdf(1.0) == 0.0);  // outside [-0.866, 0.866]

    FrequencyDistribution lor(DistFamily::Lorentzian, 1.0);
    CHECK(lor.pdf(0.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("pdf normalizes to one under quadrature") {
    for (auto family : {DistFamily::Uniform, DistFamily::Gaussian, DistFamily::Lorentzian}) {
        FrequencyDistribution dist(family, 0.7);
        // Simpson over a wide symmetric window; Lorentzian tail beyond the
        // window is added analytically 2*(1/2 - atan(L/sigma)/pi).
        const double L = family == DistFamily::Lorentzian ? 4e6 * dist.sigma : 14.0 * dist.sigma;
        const std::size_t steps = 2'000'000;
        const double h = 2.0 * L / static_cast<double>(steps);
        double sum = dist.pdf(-L) + dist.pdf(L);
        for (std::size_t i = 1; i < steps; ++i) {
            const double x = -L + h * static_cast<double>(i);
            sum += dist.pdf(x) * (i % 2 ? 4.0 : 2.0);
        }
        double integral = sum * h / 3.0;
        if (family == DistFamily::Lorentzian) {
            integral += 1.0 - 2.0 * std::atan(L / dist.sigma) / std::numbers::pi;
        }
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("stratified two-point quantiles") {
    auto real = sample(FrequencyDistribution(DistFamily::Uniform, 0.5), 2,
                       SamplingScheme::Stratified);
    const double w = std::sqrt(3.0) * 0.5;
    CHECK(real.omegas[0] == doctest::Approx(-w / 2.0).epsilon(1e-12));
    CHECK(real.omegas[1] == doctest::Approx(w / 2.0).epsilon(1e-12));
}

TEST_CASE("recentering holds for every family and scheme") {
    for (auto family : {DistFamily::Uniform, DistFamily::Gaussian, DistFamily::Lorentzian}) {
        for (auto scheme : {SamplingScheme::Stratified, SamplingScheme::IID}) {
            auto real = sample(FrequencyDistribution(family, 1.3), 1777, scheme, 99);
            double sum = 0.0;
            for (double w : real.omegas) sum += w;
            CHECK(std::abs(sum) < 1e-12);
        }
    }
}

TEST_CASE("stratified determinism is bitwise") {
    auto a = sample(FrequencyDistribution(DistFamily::Gaussian, 0.8), 501,
                    SamplingScheme::Stratified);
    auto b = sample(FrequencyDistribution(DistFamily::Gaussian, 0.8), 501,
                    SamplingScheme::Stratified);
    REQUIRE(a.omegas.size() == b.omegas.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.omegas[i] == b.omegas[i]);
}

TEST_CASE("iid gaussian sample std matches the distribution") {
    auto real = sample(FrequencyDistribution(DistFamily::Gaussian, 1.0), 100000,
                       SamplingScheme::IID, 2024);
    double var = 0.0;
    for (double w : real.omegas) var += w * w;
    var /= static_cast<double>(real.size());
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sample rejects n < 2") {
    CHECK_THROWS_AS(sample(FrequencyDistribution(DistFamily::Uniform, 0.5), 1,
                           SamplingScheme::IID, 7),
                    ValidationError);
}

TEST_CASE("free decay closed forms") {
    FrequencyDistribution gauss(DistFamily::Gaussian, 1.0);
    CHECK(free_decay(gauss, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(free_decay(gauss, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    FrequencyDistribution uni(DistFamily::Uniform, 1.0);
    CHECK(free_decay(uni, 1.0, std::numbers::pi / std::sqrt(3.0)) ==
          doctest::Approx(0.0).epsilon(1e-20));

    FrequencyDistribution lor(DistFamily::Lorentzian, 0.3);
    CHECK(free_decay(lor, 0.7, 2.0) == doctest::Approx(0.7 * std::exp(-1.2)).epsilon(1e-12));
}

TEST_CASE("free decay never exceeds eta0") {
    for (auto family : {DistFamily::Uniform, DistFamily::Gaussian, DistFamily::Lorentzian}) {
        FrequencyDistribution dist(family, 0.9);
        for (double t = 0.0; t < 20.0; t += 0.05) {
            CHECK(free_decay(dist, 0.83, t) <= 0.83 + 1e-15);
        }
    }
}

// Fourier-sum convergence: the integrator at J = 0 reproduces the analytic
// characteristic-function decay for all three families.
TEST_CASE("zero interaction integrator matches free decay") {
    const std::size_t n = 2000;
    for (auto family : {DistFamily::Uniform, DistFamily::Gaussian, DistFamily::Lorentzian}) {
        FrequencyDistribution dist(family, 1.0);
        auto real = sample(dist, n, SamplingScheme::Stratified);
        auto net = InteractionNetwork::none(n);
        IntegrationParams params;
        params.t_max = 3.0;
        params.dt = 0.005;
        auto trace = integrate(init_coherent(n, 1.0, std::numbers::pi / 2.0), real, net, params);
        for (std::size_t i = 0; i < trace.times.size(); i += 25) {
            const double expected = free_decay(dist, 1.0, trace.times[i]);
            CHECK(std::abs(trace.eta[i] - expected) < 1e-3);
        }
    }
}
