#pragma once

// Brute-force quantum oracle: the spin Hamiltonian restricted to fixed
// excitation-number sectors (hopping of hardcore excitations), propagated by
// eigendecomposition at small dimensions or a Chebyshev expansion for larger
// sparse sectors. Validates the single-excitation engine and the fidelity law.

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "supercoh/disorder.hpp"
#include "supercoh/meanfield.hpp"
#include "supercoh/network.hpp"

namespace supercoh {

struct ExactOptions {
    std::size_t sector_dimension_cap = 200000;
    std::size_t eigen_cap = 4000;        // dense eigendecomposition below this
    std::size_t full_spins_cap = 14;     // 2^N full-space evolution limit
    double norm_drift_tol = 1e-6;
};

// All C(N, n) excitation configurations as bitmasks, ordered lexicographically
// in the sorted excited-site tuples.
class SectorBasis {
public:
    static SectorBasis build(std::size_t n_spins, std::size_t n_exc,
                             std::size_t dimension_cap = 200000);

    std::size_t n_spins() const noexcept { return n_spins_; }
    std::size_t n_exc() const noexcept { return n_exc_; }
    std::size_t dim() const noexcept { return masks_.size(); }
    std::uint64_t mask(std::size_t index) const { return masks_[index]; }
    std::size_t index_of(std::uint64_t mask) const;

private:
    std::size_t n_spins_ = 0;
    std::size_t n_exc_ = 0;
    std::vector<std::uint64_t> masks_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

struct SectorState {
    const SectorBasis* basis = nullptr;
    Eigen::VectorXcd amplitudes;
};

// Diagonal: sum of Omega_i over excited sites (the rotating frame makes the
// remaining s^z constant vanish). Off-diagonal: J_ij for one-excitation hops.
Eigen::SparseMatrix<double> build_sector_hamiltonian(const DisorderRealization& realization,
                                                     const InteractionNetwork& net,
                                                     const SectorBasis& basis);

// Equal amplitudes 1/sqrt(C(N,n)): the normalized (S^+)^n |0>.
SectorState symmetric_state(const SectorBasis& basis);

// <d|S^-|psi> for every (n-1)-configuration d; eta = (4/N^2) |S^- psi|^2.
Eigen::VectorXcd apply_lowering(const SectorBasis& basis, const SectorBasis& basis_minus,
                                const Eigen::VectorXcd& amplitudes);

struct EvolveSample {
    double t;
    double fidelity;  // |<n_s | psi(t)>|^2
    double eta;       // (4/N^2) <psi| S^+ S^- |psi>
};

struct EvolveResult {
    std::vector<EvolveSample> samples;
    // Exact infinite-time average of the fidelity (eigendecomposition path);
    // trapezoidal window average on the Chebyshev path.
    double fidelity_avg = 0.0;
    bool exact_average = true;
};

EvolveResult evolve_fidelity(const Eigen::SparseMatrix<double>& h_sector,
                             const SectorBasis& basis, const SectorState& initial,
                             const std::vector<double>& times, const ExactOptions& options = {});

// Full 2^N evolution of the pure product state (r0 = 1, angles theta0/phi0),
// carried out per excitation block (the Hamiltonian conserves S^z exactly).
CoherenceTrace full_evolve(const DisorderRealization& realization, const InteractionNetwork& net,
                           double theta0, double phi0, const std::vector<double>& times,
                           const ExactOptions& options = {});

// Per-block norms of the product state after evolution (conservation checks).
std::vector<double> full_evolve_block_norms(const DisorderRealization& realization,
                                            const InteractionNetwork& net, double theta0,
                                            double phi0, double t_final,
                                            const ExactOptions& options = {});

double binomial(std::size_t n, std::size_t k) noexcept;

}  // namespace supercoh
