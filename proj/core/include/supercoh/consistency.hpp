#pragma once

// Self-consistent steady-state analysis: the coupled integral equations for
// (r, Delta), the critical disorder boundary, the closed forms for the
// uniform/Lorentzian families, and the analytic all-to-all gap/fidelity curves.

#include <array>
#include <cstddef>
#include <vector>

#include "supercoh/disorder.hpp"

namespace supercoh {

enum class Phase { Supercoherent, Decoherent };

const char* to_string(Phase phase) noexcept;

struct SelfConsistentSolution {
    double r = 0.0;      // sqrt(eta_bar); 0 in the decoherent phase
    double delta = 0.0;  // collective frequency-shift unknown
    Phase phase = Phase::Decoherent;
    std::array<double, 2> residual{0.0, 0.0};
};

struct SolverOptions {
    double r_tol = 1e-6;        // smallest r reported as supercoherent
    double residual_tol = 1e-8;
    double quad_rel_tol = 1e-11;
    int max_iterations = 200;
};

// Solves
//   r * I[p / ((W+D)^2 + r^2)] = sin(theta0)/r0
//       I[p (W+D) / ((W+D)^2 + r^2)] = cos(theta0)/r0
// for (r, Delta): damped Newton from (r0 sin(theta0), 0), falling back to a
// nested bisection (outer on Delta, inner on r). Lorentzian integrals are
// closed-form Cauchy results; Uniform/Gaussian use adaptive quadrature
// (Gaussian truncated at 12 sigma).
SelfConsistentSolution solve_selfconsistent(const FrequencyDistribution& dist, double theta0,
                                            double r0, const SolverOptions& options = {});

// Bisection in sigma for the vanishing of the positive-r root, to abs_tol.
// Throws NoTransitionError when no sign change is bracketed in (1e-4, 1e3).
double critical_sigma(DistFamily family, double theta0, double r0, double abs_tol = 1e-6,
                      const SolverOptions& options = {});

// Independent r->0 route: pi p_sigma(-Delta*) = sin(theta0)/r0 with Delta*
// fixed by the principal-value equation. Used to cross-check critical_sigma.
double critical_sigma_boundary(DistFamily family, double theta0, double r0);

// Principal value of I[p_sigma / (W + delta)] (quadrature with singularity
// subtraction; exposed for the boundary cross-check tests).
double pv_hilbert(const FrequencyDistribution& dist, double delta);

struct Table1Result {
    double sigma_c;
    double eta_bar;
};

// Analytic critical disorder for all three families plus the closed-form
// eta_bar for Uniform (valid on the theta0 = pi/2 slice) and Lorentzian;
// the Gaussian eta_bar falls back to the numerical solver below sigma_c.
Table1Result table1_closed_forms(DistFamily family, double sigma, double theta0, double r0);

struct AllToAllAnalytic {
    double e_gap;          // sqrt(3) sigma (coth(sqrt(3) sigma) - 1)
    double rel_coherence;  // 9 sigma^4 csch^4(sqrt(3) sigma)
};

// Uniform disorder, all-to-all coupling, low excitation; sigma = 0 returns the
// analytic limits (1, 1).
AllToAllAnalytic analytic_all_to_all(double sigma);

// Least-squares slope of log(eta_bar) vs log(sigma_c - sigma) over the window
// sigma in [0.8 sigma_c, 0.99 sigma_c]. Throws InsufficientDataError with
// fewer than 5 usable points.
double fit_critical_exponent(const std::vector<std::pair<double, double>>& curve, double sigma_c);

// Imaginary error function and its inverse (series / bracketed Newton).
double erfi(double x);
double erfi_inv(double y);

}  // namespace supercoh
