#include "supercoh/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace supercoh {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kPi = std::numbers::pi;

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

struct EquationValues {
    double f1;  // r * I[p / ((W+D)^2 + r^2)]
    double f2;  // I[p (W+D) / ((W+D)^2 + r^2)]
};

// Integration limits for the family (Gaussian tail beyond 12 sigma is < 1e-30).
std::pair<double, double> domain(const FrequencyDistribution& dist) {
    if (dist.family == DistFamily::Uniform) {
        const double w = kSqrt3 * dist.sigma;
        return {-w, w};
    }
    return {-12.0 * dist.sigma, 12.0 * dist.sigma};
}

double integrate_segment(const std::function<double(double)>& f, double a, double b,
                         double rel_tol) {
    if (!(b > a)) return 0.0;
    return Quad::integrate(f, a, b, 15, rel_tol);
}

// Adaptive quadrature with the domain split around the Lorentz kernel peak at
// W = -delta (width r), which otherwise starves the adaptive refinement.
double integrate_kernel(const FrequencyDistribution& dist, double r, double delta,
                        bool numerator_shift, double rel_tol) {
    auto f = [&](double w) {
        const double u = w + delta;
        const double kernel = (numerator_shift ? u : 1.0) / (u * u + r * r);
        return dist.pdf(w) * kernel;
    };
    const auto [lo, hi] = domain(dist);
    const double peak = -delta;
    const double halfwidth = 10.0 * std::max(r, 1e-300);
    double total = 0.0;
    if (peak - halfwidth > lo && peak + halfwidth < hi) {
        total += integrate_segment(f, lo, peak - halfwidth, rel_tol);
        total += integrate_segment(f, peak - halfwidth, peak, rel_tol);
        total += integrate_segment(f, peak, peak + halfwidth, rel_tol);
        total += integrate_segment(f, peak + halfwidth, hi, rel_tol);
    } else if (peak > lo && peak < hi) {
        total += integrate_segment(f, lo, peak, rel_tol);
        total += integrate_segment(f, peak, hi, rel_tol);
    } else {
        total += integrate_segment(f, lo, hi, rel_tol);
    }
    return total;
}

EquationValues evaluate(const FrequencyDistribution& dist, double r, double delta,
                        double rel_tol) {
    if (dist.family == DistFamily::Lorentzian) {
        // Cauchy integrals in closed form: the convolution adds the widths.
        const double rs = r + dist.sigma;
        const double denom = delta * delta + rs * rs;
        return {rs / denom, delta / denom};
    }
    const double f1 = r * integrate_kernel(dist, r, delta, false, rel_tol);
    const double f2 = integrate_kernel(dist, r, delta, true, rel_tol);
    return {f1, f2};
}

struct Target {
    double s;  // sin(theta0) / r0
    double c;  // cos(theta0) / r0
};

std::array<double, 2> residuals(const FrequencyDistribution& dist, const Target& tgt, double r,
                                double delta, double rel_tol) {
    const auto v = evaluate(dist, r, delta, rel_tol);
    return {v.f1 - tgt.s, v.f2 - tgt.c};
}

double norm2(const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); }

struct NewtonOutcome {
    bool converged = false;
    double r = 0.0, delta = 0.0;
    std::array<double, 2> residual{0.0, 0.0};
};

NewtonOutcome newton2d(const FrequencyDistribution& dist, const Target& tgt, double r,
                       double delta, const SolverOptions& opt) {
    auto res = residuals(dist, tgt, r, delta, opt.quad_rel_tol);
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (std::max(std::abs(res[0]), std::abs(res[1])) < opt.residual_tol) {
            return {true, r, delta, res};
        }
        const double hr = std::max(1e-8, 1e-7 * std::abs(r));
        const double hd = std::max(1e-8, 1e-7 * std::abs(delta));
        const auto rp = residuals(dist, tgt, r + hr, delta, opt.quad_rel_tol);
        const auto dp = residuals(dist, tgt, r, delta + hd, opt.quad_rel_tol);
        const double j11 = (rp[0] - res[0]) / hr, j12 = (dp[0] - res[0]) / hd;
        const double j21 = (rp[1] - res[1]) / hr, j22 = (dp[1] - res[1]) / hd;
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
        double step_r = (-res[0] * j22 + res[1] * j12) / det;
        double step_d = (-res[1] * j11 + res[0] * j21) / det;

        // damped update keeping r positive
        double lambda = 1.0;
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            double r_new = r + lambda * step_r;
            const double d_new = delta + lambda * step_d;
            if (r_new <= 0.0) {
                lambda *= 0.5;
                continue;
            }
            const auto res_new = residuals(dist, tgt, r_new, d_new, opt.quad_rel_tol);
            if (norm2(res_new) < norm2(res)) {
                r = r_new;
                delta = d_new;
                res = res_new;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    const bool ok = std::max(std::abs(res[0]), std::abs(res[1])) < opt.residual_tol;
    return {ok, r, delta, res};
}

// Inner solve of the first equation at fixed Delta. f1(r) decreases from
// pi p(-Delta) at r->0+, so a positive root exists iff that limit exceeds s.
std::optional<double> solve_r_given_delta(const FrequencyDistribution& dist, const Target& tgt,
                                          double delta, const SolverOptions& opt) {
    const double limit0 = kPi * dist.pdf(-delta);
    if (!(limit0 > tgt.s)) return std::nullopt;
    double lo = 1e-12;
    double hi = std::max(2.0, 2.0 / tgt.s);
    auto f = [&](double r) {
        return evaluate(dist, r, delta, opt.quad_rel_tol).f1 - tgt.s;
    };
    double flo = f(lo);
    double fhi = f(hi);
    if (flo < 0.0 || fhi > 0.0) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) < 0.1 * opt.residual_tol || (hi - lo) < 1e-15 * hi) return mid;
        if (fm > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<NewtonOutcome> nested_scan(const FrequencyDistribution& dist, const Target& tgt,
                                         const SolverOptions& opt) {
    const double dmax = std::max({4.0, 12.0 * dist.sigma, 4.0 / std::max(tgt.s, 1e-6)});
    const int grid = 257;
    auto g = [&](double delta) -> std::optional<double> {
        auto r = solve_r_given_delta(dist, tgt, delta, opt);
        if (!r) return std::nullopt;
        return evaluate(dist, *r, delta, opt.quad_rel_tol).f2 - tgt.c;
    };
    double prev_delta = 0.0;
    std::optional<double> prev;
    bool bracketed = false;
    for (int i = 0; i < grid; ++i) {
        const double delta = -dmax + 2.0 * dmax * static_cast<double>(i) / (grid - 1);
        auto cur = g(delta);
        if (prev && cur && ((*prev <= 0.0 && *cur >= 0.0) || (*prev >= 0.0 && *cur <= 0.0))) {
            bracketed = true;
            double lo = prev_delta, hi = delta, glo = *prev;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto gm = g(mid);
                if (!gm) break;
                if ((glo <= 0.0) == (*gm <= 0.0)) {
                    lo = mid;
                    glo = *gm;
                } else {
                    hi = mid;
                }
                if (hi - lo < 1e-14 * std::max(1.0, std::abs(hi))) break;
            }
            const double delta_root = 0.5 * (lo + hi);
            if (auto r = solve_r_given_delta(dist, tgt, delta_root, opt)) {
                auto out = newton2d(dist, tgt, *r, delta_root, opt);
                if (out.converged && out.r > 0.0) return out;
            }
        }
        prev = cur;
        prev_delta = delta;
    }
    if (bracketed) {
        throw ConvergenceFailure("self-consistent root bracketed but not converged to tolerance");
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(Phase phase) noexcept {
    return phase == Phase::Supercoherent ? "supercoherent" : "decoherent";
}

SelfConsistentSolution solve_selfconsistent(const FrequencyDistribution& dist, double theta0,
                                            double r0, const SolverOptions& opt) {
    if (!(r0 > 0.0 && r0 <= 1.0)) throw ValidationError("r0 must lie in (0,1]");
    if (!(theta0 > 0.0 && theta0 < kPi)) throw ValidationError("theta0 must lie in (0,pi)");
    const Target tgt{std::sin(theta0) / r0, std::cos(theta0) / r0};

    SelfConsistentSolution sol;

    // Newton from the zero-disorder solution, then a couple of spread starts.
    const double r_guess = r0 * std::sin(theta0);
    const std::array<std::pair<double, double>, 4> starts{
        std::pair{r_guess, 0.0},
        std::pair{0.5 * r_guess, (r_guess + dist.sigma) * tgt.c / tgt.s},
        std::pair{0.1 * r_guess, dist.sigma * tgt.c},
        std::pair{2.0 * r_guess, 0.0},
    };
    for (const auto& [r_start, d_start] : starts) {
        auto out = newton2d(dist, tgt, r_start, d_start, opt);
        if (out.converged && out.r >= opt.r_tol) {
            sol.r = out.r;
            sol.delta = out.delta;
            sol.phase = Phase::Supercoherent;
            sol.residual = out.residual;
            return sol;
        }
    }
    if (auto out = nested_scan(dist, tgt, opt); out && out->r >= opt.r_tol) {
        sol.r = out->r;
        sol.delta = out->delta;
        sol.phase = Phase::Supercoherent;
        sol.residual = out->residual;
        return sol;
    }

    sol.phase = Phase::Decoherent;
    sol.r = 0.0;
    sol.residual = {kPi * dist.pdf(0.0) - tgt.s, 0.0};
    return sol;
}

double critical_sigma(DistFamily family, double theta0, double r0, double abs_tol,
                      const SolverOptions& options) {
    auto supercoherent = [&](double sigma) {
        return solve_selfconsistent(FrequencyDistribution(family, sigma), theta0, r0, options)
                   .phase == Phase::Supercoherent;
    };
    double lo = 1e-4, hi = 1e3;
    if (!supercoherent(lo) || supercoherent(hi)) {
        throw NoTransitionError("no supercoherent/decoherent sign change in sigma in (1e-4, 1e3)");
    }
    while (hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        (supercoherent(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double pv_hilbert(const FrequencyDistribution& dist, double delta) {
    if (dist.family == DistFamily::Lorentzian) {
        const double s = dist.sigma;
        return delta / (delta * delta + s * s);
    }
    const auto [lo, hi] = domain(dist);
    const double peak = -delta;
    const double p0 = dist.pdf(peak);
    auto regular = [&](double w) {
        const double u = w + delta;
        if (std::abs(u) < 1e-14) {
            // removable point: derivative of the pdf
            const double h = 1e-6 * std::max(1.0, dist.sigma);
            return (dist.pdf(peak + h) - dist.pdf(peak - h)) / (2.0 * h);
        }
        return (dist.pdf(w) - p0) / u;
    };
    if (peak <= lo || peak >= hi) {
        auto plain = [&](double w) { return dist.pdf(w) / (w + delta); };
        return integrate_segment(plain, lo, hi, 1e-12);
    }
    double total = integrate_segment(regular, lo, peak, 1e-12) +
                   integrate_segment(regular, peak, hi, 1e-12);
    total += p0 * std::log(std::abs((hi + delta) / (lo + delta)));
    return total;
}

double critical_sigma_boundary(DistFamily family, double theta0, double r0) {
    if (!(r0 > 0.0 && r0 <= 1.0)) throw ValidationError("r0 must lie in (0,1]");
    if (!(theta0 > 0.0 && theta0 < kPi)) throw ValidationError("theta0 must lie in (0,pi)");
    const double s = std::sin(theta0) / r0;
    const double c = std::cos(theta0) / r0;

    // For each sigma, the PV equation fixes Delta*; the boundary is where
    // pi p_sigma(-Delta*) falls to s. Scan + bisection on sigma.
    auto boundary_gap = [&](double sigma) -> std::optional<double> {
        FrequencyDistribution dist(family, sigma);
        // find Delta with pv_hilbert(Delta) = c on a bracketing grid
        const double dmax = std::max(4.0, 24.0 * sigma);
        const int grid = 513;
        double prev_delta = -dmax;
        double prev = pv_hilbert(dist, prev_delta) - c;
        for (int i = 1; i < grid; ++i) {
            const double delta = -dmax + 2.0 * dmax * static_cast<double>(i) / (grid - 1);
            const double cur = pv_hilbert(dist, delta) - c;
            if ((prev <= 0.0 && cur >= 0.0) || (prev >= 0.0 && cur <= 0.0)) {
                double lo = prev_delta, hi = delta, flo = prev;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = pv_hilbert(dist, mid) - c;
                    if ((flo <= 0.0) == (fm <= 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                const double delta_star = 0.5 * (lo + hi);
                return kPi * dist.pdf(-delta_star) - s;
            }
            prev = cur;
            prev_delta = delta;
        }
        return std::nullopt;  // PV equation unsolvable at this sigma
    };

    double lo = 1e-4, hi = 1e3;
    auto glo = boundary_gap(lo);
    if (!glo || *glo <= 0.0) throw NoTransitionError("no r->0 boundary below sigma = 1e-4");
    // walk hi down until the PV equation is solvable, keeping a sign change
    auto ghi = boundary_gap(hi);
    while ((!ghi || *ghi > 0.0) && hi > 2.0 * lo) {
        if (ghi && *ghi > 0.0) throw NoTransitionError("boundary condition positive at sigma = 1e3");
        hi *= 0.5;
        ghi = boundary_gap(hi);
    }
    if (!ghi || *ghi > 0.0) throw NoTransitionError("r->0 boundary not bracketed");
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto gm = boundary_gap(mid);
        if (gm && *gm > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

Table1Result table1_closed_forms(DistFamily family, double sigma, double theta0, double r0) {
    if (!(r0 > 0.0 && r0 <= 1.0)) throw ValidationError("r0 must lie in (0,1]");
    if (!(theta0 > 0.0 && theta0 < kPi)) throw ValidationError("theta0 must lie in (0,pi)");
    const double sin0 = std::sin(theta0);
    switch (family) {
        case DistFamily::Uniform: {
            const double sigma_c = kPi * r0 / (2.0 * kSqrt3 * sin0);
            double eta = 0.0;
            if (sigma < sigma_c) {
                // (sigma/sigma_c)(pi/2)/sin(theta0) reduces to sqrt(3) sigma / r0
                const double arg = kSqrt3 * sigma / r0;
                const double cot = std::cos(arg) / std::sin(arg);
                eta = 3.0 * sigma * sigma * cot * cot;
            }
            return {sigma_c, eta};
        }
        case DistFamily::Gaussian: {
            const double u = erfi_inv(std::cos(theta0) / sin0);
            const double sigma_c = std::sqrt(kPi / 2.0) * (r0 / sin0) * std::exp(-u * u);
            double eta = 0.0;
            if (sigma < sigma_c) {
                const auto sol =
                    solve_selfconsistent(FrequencyDistribution(DistFamily::Gaussian, sigma),
                                         theta0, r0);
                eta = sol.r * sol.r;
            }
            return {sigma_c, eta};
        }
        case DistFamily::Lorentzian: {
            const double sigma_c = r0 * sin0;
            const double eta = sigma < sigma_c ? (sigma_c - sigma) * (sigma_c - sigma) : 0.0;
            return {sigma_c, eta};
        }
    }
    throw ValidationError("unreachable distribution family");
}

AllToAllAnalytic analytic_all_to_all(double sigma) {
    if (sigma < 0.0) throw ValidationError("sigma must be nonnegative");
    if (sigma == 0.0) return {1.0, 1.0};
    const double x = kSqrt3 * sigma;
    // coth(x) - 1 = 2 / (e^{2x} - 1), stable for small x via expm1
    const double e_gap = 2.0 * x / std::expm1(2.0 * x);
    double rel = 0.0;
    if (x < 350.0) {
        const double w = x / std::sinh(x);
        rel = w * w * w * w;
    }
    return {e_gap, rel};
}

double fit_critical_exponent(const std::vector<std::pair<double, double>>& curve,
                             double sigma_c) {
    std::vector<std::pair<double, double>> pts;  // (log(sigma_c - sigma), log eta)
    for (const auto& [sigma, eta] : curve) {
        if (sigma < 0.8 * sigma_c || sigma > 0.99 * sigma_c) continue;
        if (!(eta > 0.0) || sigma >= sigma_c) continue;
        pts.emplace_back(std::log(sigma_c - sigma), std::log(eta));
    }
    if (pts.size() < 5) {
        throw InsufficientDataError("need >= 5 points with sigma in [0.8, 0.99] sigma_c and eta > 0");
    }
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw InsufficientDataError("degenerate sigma window");
    return sxy / sxx;
}

double erfi(double x) {
    // Maclaurin series; all terms share the sign of x, so no cancellation.
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int k = 1; k < 400; ++k) {
        term *= x2 / static_cast<double>(k);
        const double add = term / static_cast<double>(2 * k + 1);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return 2.0 / std::sqrt(kPi) * sum;
}

double erfi_inv(double y) {
    if (y == 0.0) return 0.0;
    const double sign = y > 0.0 ? 1.0 : -1.0;
    const double target = std::abs(y);
    double hi = 1.0;
    while (erfi(hi) < target) {
        hi *= 2.0;
        if (hi > 16.0) throw ValidationError("erfi_inv argument out of supported range");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (erfi(mid) < target ? lo : hi) = mid;
    }
    return sign * 0.5 * (lo + hi);
}

}  // namespace supercoh
