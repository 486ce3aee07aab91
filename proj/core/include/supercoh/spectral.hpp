#pragma once

// Single-excitation spectral engine: diagonalizes Omega_i delta_ij + J_ij,
// weights each normal mode by its overlap with the uniform (symmetric) vector,
// detects the isolated state and its gap, and evaluates the coherence trace,
// its exact time average, and the fidelity predictions. Authoritative path for
// arbitrary interaction geometries.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "supercoh/disorder.hpp"
#include "supercoh/meanfield.hpp"
#include "supercoh/network.hpp"

namespace supercoh {

struct SpectralOptions {
    std::size_t dense_cap = 4000;       // above this, iterative extremal solver
    double gap_spacing_factor = 10.0;   // gap must beat this times the median band spacing
    double weight_threshold = 0.5;      // symmetric-vector weight to call a mode delocalized
    double degeneracy_tol = 1e-9;       // energies closer than this time-average as one class
    std::size_t lanczos_iterations = 300;
};

struct GapInfo {
    double e_gap;
    std::size_t isolated_index;
};

struct SpectralMeta {
    std::size_t n = 0;
    double sigma = 0.0;
    std::string dist;
    std::string geometry;
    Sign sign = Sign::Attractive;
    std::uint64_t seed = 0;
    std::string scheme;
};

struct SpectralResult {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXd modes;     // orthonormal eigenvectors as columns (dense path)
    Eigen::VectorXd weights;   // w_k = |<u_sym | v_k>|^2
    std::optional<GapInfo> gap;
    SpectralMeta meta;
    bool full_spectrum = true;  // false for the iterative extremal-pair fallback
};

Eigen::MatrixXd build_matrix(const DisorderRealization& realization,
                             const InteractionNetwork& net);

SpectralResult diagonalize(const Eigen::MatrixXd& matrix, const SpectralMeta& meta,
                           const SpectralOptions& options = {});

// build + diagonalize (or the iterative fallback above dense_cap) + gap scan.
SpectralResult analyze(const DisorderRealization& realization, const InteractionNetwork& net,
                       const SpectralOptions& options = {});

// Isolated state on the attractive side (lowest for sign -, highest for +).
// Present only when the edge gap beats gap_spacing_factor times the median
// band spacing AND the mode carries more than weight_threshold of u_sym.
std::optional<GapInfo> detect_gap(const SpectralResult& result,
                                  const SpectralOptions& options = {});

// eta(t)/eta(0) = |sum_k w_k exp(-i E_k t)|^2 on the given time grid.
CoherenceTrace coherence_trace_hp(const SpectralResult& result, const std::vector<double>& times);

// Exact infinite-time average of the trace above: sum over degeneracy classes
// of the squared class weight. Falls back to w_iso^2 + (1-w_iso)^2/(N-1) when
// only the extremal pairs are available.
double relative_coherence_avg(const SpectralResult& result, const SpectralOptions& options = {});

// Time-averaged fidelity prediction for the n-excitation symmetric state:
// (w_iso^2)^n, i.e. the relative coherence carried by the isolated mode to the
// n-th power. Throws NoIsolatedStateError when no isolated state was detected.
double fidelity_n(const SpectralResult& result, int n);

// Laboratory-frame ladder spacing between consecutive supercoherent states.
// The rotating frame used throughout subtracts the mean frequency, so the
// spacing is the caller-supplied <omega> and 0 by construction in-frame.
double ladder_spacing(double omega_mean = 0.0) noexcept;

// All eigenvalue sums of `n` single-excitation levels (the n-excitation
// spectrum under the quadratic approximation); test/inspection helper.
std::vector<double> direct_sum_spectrum(const std::vector<double>& single_levels, int n);

}  // namespace supercoh
