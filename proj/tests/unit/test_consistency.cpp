#include <doctest.h>

#include <cmath>
#include <numbers>

#include "supercoh/consistency.hpp"

using namespace supercoh;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = 1.7320508075688772;
}  // namespace

TEST_CASE("lorentzian solver hits the closed form") {
    auto sol = solve_selfconsistent(FrequencyDistribution(DistFamily::Lorentzian, 0.4),
                                    kPi / 2.0, 1.0);
    REQUIRE(sol.phase == Phase::Supercoherent);
    CHECK(sol.r == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(std::abs(sol.delta) < 1e-8);

    auto above = solve_selfconsistent(FrequencyDistribution(DistFamily::Lorentzian, 1.2),
                                      kPi / 2.0, 1.0);
    CHECK(above.phase == Phase::Decoherent);
    CHECK(above.r == 0.0);
}

TEST_CASE("lorentzian r tracks sigma_c - sigma across the full range") {
    for (double sigma : {0.05, 0.2, 0.5, 0.75, 0.9, 0.99}) {
        auto sol = solve_selfconsistent(FrequencyDistribution(DistFamily::Lorentzian, sigma),
                                        kPi / 2.0, 1.0);
        REQUIRE(sol.phase == Phase::Supercoherent);
        CHECK(std::abs(sol.r - (1.0 - sigma)) < 1e-6);
    }
}

TEST_CASE("uniform solver matches table closed form") {
    auto sol = solve_selfconsistent(FrequencyDistribution(DistFamily::Uniform, 0.5),
                                    kPi / 2.0, 1.0);
    REQUIRE(sol.phase == Phase::Supercoherent);
    const double expected = 3.0 * 0.25 / std::pow(std::tan(kSqrt3 * 0.5), 2);
    CHECK(sol.r * sol.r == doctest::Approx(expected).epsilon(2e-4 / expected));
}

TEST_CASE("critical sigma values") {
    CHECK(critical_sigma(DistFamily::Uniform, kPi / 2.0, 1.0) ==
          doctest::Approx(kPi / (2.0 * kSqrt3)).epsilon(1e-5));
    CHECK(critical_sigma(DistFamily::Lorentzian, kPi / 3.0, 0.8) ==
          doctest::Approx(0.8 * std::sin(kPi / 3.0)).epsilon(1e-5));
    CHECK(critical_sigma(DistFamily::Uniform, kPi / 4.0, 1.0) ==
          doctest::Approx(kPi / (2.0 * kSqrt3 * std::sin(kPi / 4.0))).epsilon(1e-5));
}

TEST_CASE("critical sigma scaling across the (r0, theta0) grid") {
    for (double r0 : {0.5, 0.8, 1.0}) {
        for (double theta0 : {0.6, 1.0, kPi / 2.0}) {
            const double uni = critical_sigma(DistFamily::Uniform, theta0, r0);
            CHECK(uni == doctest::Approx(kPi * r0 / (2.0 * kSqrt3 * std::sin(theta0)))
                             .epsilon(2e-5));
            const double lor = critical_sigma(DistFamily::Lorentzian, theta0, r0);
            CHECK(lor == doctest::Approx(r0 * std::sin(theta0)).epsilon(2e-5));
        }
    }
}

TEST_CASE("r -> 0 boundary conditions cross-check the bisection route") {
    CHECK(critical_sigma_boundary(DistFamily::Uniform, kPi / 2.0, 1.0) ==
          doctest::Approx(kPi / (2.0 * kSqrt3)).epsilon(1e-4));
    CHECK(critical_sigma_boundary(DistFamily::Lorentzian, 1.1, 0.9) ==
          doctest::Approx(0.9 * std::sin(1.1)).epsilon(1e-4));
    // Gaussian at an off-axis angle: against the closed form (exp(-u^2) branch)
    const double theta0 = kPi / 3.0;
    const double closed = table1_closed_forms(DistFamily::Gaussian, 0.1, theta0, 1.0).sigma_c;
    CHECK(critical_sigma_boundary(DistFamily::Gaussian, theta0, 1.0) ==
          doctest::Approx(closed).epsilon(1e-3));
    CHECK(critical_sigma(DistFamily::Gaussian, theta0, 1.0) ==
          doctest::Approx(closed).epsilon(1e-3));
}

TEST_CASE("table closed forms") {
    // sigma -> 0 limit of the uniform eta-bar is eta(0) = 1
    auto uni = table1_closed_forms(DistFamily::Uniform, 1e-6, kPi / 2.0, 1.0);
    CHECK(uni.eta_bar == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(uni.sigma_c == doctest::Approx(kPi / (2.0 * kSqrt3)).epsilon(1e-12));

    auto lor = table1_closed_forms(DistFamily::Lorentzian, 0.4, kPi / 2.0, 1.0);
    CHECK(lor.eta_bar == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(lor.sigma_c == doctest::Approx(1.0));

    auto gauss = table1_closed_forms(DistFamily::Gaussian, 2.0, kPi / 2.0, 1.0);
    CHECK(gauss.sigma_c == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-12));
    CHECK(gauss.eta_bar == 0.0);  // above sigma_c
}

TEST_CASE("solver r^2 equals closed forms below sigma_c") {
    for (double sigma : {0.1, 0.3, 0.6, 0.9}) {
        auto sol = solve_selfconsistent(FrequencyDistribution(DistFamily::Lorentzian, sigma),
                                        kPi / 2.0, 1.0);
        auto closed = table1_closed_forms(DistFamily::Lorentzian, sigma, kPi / 2.0, 1.0);
        CHECK(std::abs(sol.r * sol.r - closed.eta_bar) < 1e-6);
    }
    for (double sigma : {0.2, 0.5, 0.8}) {
        auto sol = solve_selfconsistent(FrequencyDistribution(DistFamily::Uniform, sigma),
                                        kPi / 2.0, 1.0);
        auto closed = table1_closed_forms(DistFamily::Uniform, sigma, kPi / 2.0, 1.0);
        CHECK(std::abs(sol.r * sol.r - closed.eta_bar) < 1e-4);
    }
}

TEST_CASE("boundary continuity: r vanishes continuously at sigma_c") {
    for (auto family : {DistFamily::Uniform, DistFamily::Gaussian, DistFamily::Lorentzian}) {
        const double sigma_c = critical_sigma(family, kPi / 2.0, 1.0);
        double previous = 1e9;
        for (double frac : {0.9, 0.99, 0.999}) {
            auto sol = solve_selfconsistent(FrequencyDistribution(family, frac * sigma_c),
                                            kPi / 2.0, 1.0);
            REQUIRE(sol.phase == Phase::Supercoherent);
            CHECK(sol.r < previous);
            previous = sol.r;
        }
        CHECK(previous < 0.05);  // nearly closed at 0.999 sigma_c
    }
}

TEST_CASE("symmetric case gives zero delta") {
    for (auto family : {DistFamily::Uniform, DistFamily::Gaussian, DistFamily::Lorentzian}) {
        auto sol = solve_selfconsistent(FrequencyDistribution(family, 0.3), kPi / 2.0, 1.0);
        REQUIRE(sol.phase == Phase::Supercoherent);
        CHECK(std::abs(sol.delta) < 1e-8);
    }
}

// Low-excitation asymmetry: the uniform family keeps a positive-r solution at
// fixed sigma as theta0 -> 0 while the unbounded families lose theirs;
// sigma_c(uniform) / sigma_c(lorentz/gauss) diverges.
TEST_CASE("low excitation favors the uniform distribution") {
    const double theta0 = 0.05;
    auto uni = solve_selfconsistent(FrequencyDistribution(DistFamily::Uniform, 0.3), theta0, 1.0);
    CHECK(uni.phase == Phase::Supercoherent);
    auto uni_big = solve_selfconsistent(FrequencyDistribution(DistFamily::Uniform, 1.0), theta0, 1.0);
    CHECK(uni_big.phase == Phase::Supercoherent);

    for (double sigma : {0.1, 0.3, 1.0}) {
        auto lor = solve_selfconsistent(FrequencyDistribution(DistFamily::Lorentzian, sigma),
                                        theta0, 1.0);
        CHECK(lor.phase == Phase::Decoherent);
    }
    for (double sigma : {0.6, 1.0}) {
        auto gauss = solve_selfconsistent(FrequencyDistribution(DistFamily::Gaussian, sigma),
                                          theta0, 1.0);
        CHECK(gauss.phase == Phase::Decoherent);
    }
    const double uni_c = critical_sigma(DistFamily::Uniform, theta0, 1.0);
    const double lor_c = critical_sigma(DistFamily::Lorentzian, theta0, 1.0);
    const double gauss_c = critical_sigma(DistFamily::Gaussian, theta0, 1.0);
    CHECK(uni_c / lor_c > 100.0);
    CHECK(uni_c / gauss_c > 10.0);
}

TEST_CASE("analytic all-to-all gap and fidelity") {
    auto zero = analytic_all_to_all(0.0);
    CHECK(zero.e_gap == doctest::Approx(1.0));
    CHECK(zero.rel_coherence == doctest::Approx(1.0));

    auto tiny = analytic_all_to_all(1e-9);
    CHECK(tiny.e_gap == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(tiny.rel_coherence == doctest::Approx(1.0).epsilon(1e-6));

    auto s01 = analytic_all_to_all(0.1);
    CHECK(s01.e_gap == doctest::Approx(0.836772).epsilon(1e-5));
    CHECK(s01.rel_coherence == doctest::Approx(0.980249).epsilon(1e-5));

    // sqrt(3) (coth(sqrt 3) - 1)
    auto s1 = analytic_all_to_all(1.0);
    CHECK(s1.e_gap == doctest::Approx(0.1119338924).epsilon(1e-9));
}

TEST_CASE("critical exponent fits") {
    // exact Lorentzian power law
    std::vector<std::pair<double, double>> lor;
    for (double s = 0.78; s < 1.0; s += 0.005) lor.emplace_back(s, (1.0 - s) * (1.0 - s));
    CHECK(fit_critical_exponent(lor, 1.0) == doctest::Approx(2.0).epsilon(1e-3));

    // uniform closed-form curve near its critical point
    const double sigma_c = kPi / (2.0 * kSqrt3);
    std::vector<std::pair<double, double>> uni;
    for (double s = 0.8 * sigma_c; s < 0.995 * sigma_c; s += 0.002) {
        uni.emplace_back(s, table1_closed_forms(DistFamily::Uniform, s, kPi / 2.0, 1.0).eta_bar);
    }
    const double beta = fit_critical_exponent(uni, sigma_c);
    CHECK(beta > 1.9);
    CHECK(beta < 2.1);

    std::vector<std::pair<double, double>> flat{{0.85, 0.5}, {0.9, 0.5}};
    CHECK_THROWS_AS(fit_critical_exponent(flat, 1.0), InsufficientDataError);
}

TEST_CASE("erfi inverse round trip") {
    CHECK(erfi_inv(0.0) == 0.0);
    for (double x : {0.3, 1.0, 2.5, -1.7}) {
        CHECK(erfi_inv(erfi(x)) == doctest::Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("solver validates parameters") {
    CHECK_THROWS_AS(solve_selfconsistent(FrequencyDistribution(DistFamily::Uniform, 0.5), 0.0, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(solve_selfconsistent(FrequencyDistribution(DistFamily::Uniform, 0.5), 1.0, 0.0),
                    ValidationError);
}
