#include "supercoh/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace supercoh {

double binomial(std::size_t n, std::size_t k) noexcept {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return c;
}

SectorBasis SectorBasis::build(std::size_t n_spins, std::size_t n_exc, std::size_t dimension_cap) {
    if (n_spins < 1 || n_spins > 63) throw ValidationError("sector basis supports 1..63 spins");
    if (n_exc > n_spins) throw ValidationError("excitation number exceeds spin count");
    const double dim = binomial(n_spins, n_exc);
    if (dim > static_cast<double>(dimension_cap)) {
        throw DimensionCapError("sector dimension C(" + std::to_string(n_spins) + "," +
                                std::to_string(n_exc) + ") exceeds the cap of " +
                                std::to_string(dimension_cap));
    }

    SectorBasis basis;
    basis.n_spins_ = n_spins;
    basis.n_exc_ = n_exc;
    basis.masks_.reserve(static_cast<std::size_t>(dim));
    if (n_exc == 0) {
        basis.masks_.push_back(0);
    } else {
        // lexicographic enumeration of sorted site tuples
        std::vector<std::size_t> sites(n_exc);
        for (std::size_t i = 0; i < n_exc; ++i) sites[i] = i;
        while (true) {
            std::uint64_t mask = 0;
            for (std::size_t s : sites) mask |= (1ULL << s);
            basis.masks_.push_back(mask);
            std::size_t pos = n_exc;
            bool exhausted = true;
            while (pos > 0) {
                --pos;
                if (sites[pos] < n_spins - n_exc + pos) {
                    exhausted = false;
                    break;
                }
            }
            if (exhausted) break;
            ++sites[pos];
            for (std::size_t q = pos + 1; q < n_exc; ++q) sites[q] = sites[q - 1] + 1;
        }
    }
    basis.index_.reserve(basis.masks_.size() * 2);
    for (std::size_t i = 0; i < basis.masks_.size(); ++i) {
        basis.index_.emplace(basis.masks_[i], static_cast<std::uint32_t>(i));
    }
    return basis;
}

std::size_t SectorBasis::index_of(std::uint64_t mask) const {
    auto it = index_.find(mask);
    if (it == index_.end()) throw ValidationError("configuration not in sector basis");
    return it->second;
}

Eigen::SparseMatrix<double> build_sector_hamiltonian(const DisorderRealization& realization,
                                                     const InteractionNetwork& net,
                                                     const SectorBasis& basis) {
    const std::size_t n = basis.n_spins();
    if (realization.size() != n || net.size() != n) {
        throw ValidationError("disorder / network / basis size mismatch");
    }
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(basis.dim() * (net.edges().size() / std::max<std::size_t>(n, 1) + 2));

    for (Eigen::Index a = 0; a < dim; ++a) {
        const std::uint64_t mask = basis.mask(static_cast<std::size_t>(a));
        double diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1ULL << i)) diag += realization.omegas[i];
        }
        trips.emplace_back(a, a, diag);
        for (const auto& e : net.edges()) {
            const std::uint64_t bi = 1ULL << static_cast<std::size_t>(e.i);
            const std::uint64_t bj = 1ULL << static_cast<std::size_t>(e.j);
            const bool occ_i = mask & bi;
            const bool occ_j = mask & bj;
            if (occ_i == occ_j) continue;  // hop needs one excited, one ground endpoint
            const std::uint64_t flipped = mask ^ bi ^ bj;
            trips.emplace_back(static_cast<Eigen::Index>(basis.index_of(flipped)), a, e.weight);
        }
    }
    Eigen::SparseMatrix<double> h(dim, dim);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
}

SectorState symmetric_state(const SectorBasis& basis) {
    SectorState state;
    state.basis = &basis;
    state.amplitudes = Eigen::VectorXcd::Constant(
        static_cast<Eigen::Index>(basis.dim()),
        std::complex<double>(1.0 / std::sqrt(static_cast<double>(basis.dim())), 0.0));
    return state;
}

Eigen::VectorXcd apply_lowering(const SectorBasis& basis, const SectorBasis& basis_minus,
                                const Eigen::VectorXcd& amplitudes) {
    if (basis.n_exc() == 0) return Eigen::VectorXcd::Zero(1);
    if (basis_minus.n_spins() != basis.n_spins() || basis_minus.n_exc() + 1 != basis.n_exc()) {
        throw ValidationError("basis_minus must be the (n-1)-excitation sector");
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_minus.dim()));
    for (std::size_t a = 0; a < basis.dim(); ++a) {
        const std::complex<double> amp = amplitudes[static_cast<Eigen::Index>(a)];
        std::uint64_t rest = basis.mask(a);
        while (rest) {
            const std::uint64_t bit = rest & (~rest + 1);
            rest ^= bit;
            out[static_cast<Eigen::Index>(basis_minus.index_of(basis.mask(a) ^ bit))] += amp;
        }
    }
    return out;
}

namespace {

struct EigenPropagator {
    Eigen::VectorXd energies;
    Eigen::MatrixXd modes;
    Eigen::VectorXcd coeffs;  // modes^T psi(0)

    Eigen::VectorXcd at(double t) const {
        Eigen::VectorXcd phased(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            phased[k] = coeffs[k] * std::exp(std::complex<double>(0.0, -energies[k] * t));
        }
        return modes * phased;
    }
};

EigenPropagator make_eigen_propagator(const Eigen::SparseMatrix<double>& h,
                                      const Eigen::VectorXcd& psi0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(h));
    if (es.info() != Eigen::Success) throw DiagonalizationFailure("sector eigensolver failed");
    EigenPropagator prop;
    prop.energies = es.eigenvalues();
    prop.modes = es.eigenvectors();
    prop.coeffs = prop.modes.transpose() * psi0;
    return prop;
}

// Chebyshev expansion of exp(-iHt) on the spectral interval from Gershgorin
// bounds; steps between successive sample times keep the polynomial order low.
class ChebyshevPropagator {
public:
    ChebyshevPropagator(const Eigen::SparseMatrix<double>& h, double norm_drift_tol)
        : h_(h), drift_tol_(norm_drift_tol) {
        double lo = std::numeric_limits<double>::max();
        double hi = std::numeric_limits<double>::lowest();
        for (int col = 0; col < h.outerSize(); ++col) {
            double center = 0.0, radius = 0.0;
            for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
                if (it.row() == it.col()) center = it.value();
                else radius += std::abs(it.value());
            }
            lo = std::min(lo, center - radius);
            hi = std::max(hi, center + radius);
        }
        center_ = 0.5 * (hi + lo);
        half_ = 0.5 * (hi - lo) * 1.01 + 1e-12;
    }

    void step(Eigen::VectorXcd& psi, double dt) const {
        const double tau = half_ * dt;
        Eigen::VectorXcd t0 = psi;
        Eigen::VectorXcd t1 = scaled_apply(psi);
        Eigen::VectorXcd acc = std::cyl_bessel_j(0.0, tau) * t0;
        // (-i)^k cycles with period 4
        static constexpr std::complex<double> kPhase[4] = {
            {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
        int k = 1;
        while (true) {
            const double jk = std::cyl_bessel_j(static_cast<double>(k), tau);
            acc += 2.0 * jk * kPhase[k % 4] * t1;
            if (std::abs(jk) < 1e-16 && static_cast<double>(k) > tau) break;
            Eigen::VectorXcd t2 = 2.0 * scaled_apply(t1) - t0;
            t0.swap(t1);
            t1.swap(t2);
            ++k;
            if (k > 100000) throw NumericalBlowup("Chebyshev expansion failed to terminate");
        }
        psi = std::exp(std::complex<double>(0.0, -center_ * dt)) * acc;
        const double norm = psi.norm();
        if (std::abs(norm - 1.0) > drift_tol_) {
            throw NumericalBlowup("propagator norm drift " + std::to_string(norm - 1.0));
        }
    }

private:
    Eigen::VectorXcd scaled_apply(const Eigen::VectorXcd& v) const {
        return (h_ * v - center_ * v) / half_;
    }

    const Eigen::SparseMatrix<double>& h_;
    double center_ = 0.0;
    double half_ = 1.0;
    double drift_tol_;
};

}  // namespace

EvolveResult evolve_fidelity(const Eigen::SparseMatrix<double>& h_sector,
                             const SectorBasis& basis, const SectorState& initial,
                             const std::vector<double>& times, const ExactOptions& options) {
    if (initial.amplitudes.size() != static_cast<Eigen::Index>(basis.dim()) ||
        h_sector.rows() != static_cast<Eigen::Index>(basis.dim())) {
        throw ValidationError("sector dimension mismatch");
    }
    if (times.empty()) throw ValidationError("time grid is empty");
    const double norm0 = initial.amplitudes.norm();
    if (std::abs(norm0 - 1.0) > 1e-10) throw ValidationError("initial state must be normalized");

    const SectorBasis basis_minus =
        basis.n_exc() > 0
            ? SectorBasis::build(basis.n_spins(), basis.n_exc() - 1, options.sector_dimension_cap)
            : SectorBasis::build(basis.n_spins(), 0, options.sector_dimension_cap);
    const Eigen::VectorXcd sym = symmetric_state(basis).amplitudes;
    const double n2 = static_cast<double>(basis.n_spins()) * static_cast<double>(basis.n_spins());

    EvolveResult result;
    result.samples.reserve(times.size());

    auto sample = [&](double t, const Eigen::VectorXcd& psi) {
        const double fid = std::norm(sym.dot(psi));
        const double eta =
            basis.n_exc() == 0
                ? 0.0
                : 4.0 / n2 * apply_lowering(basis, basis_minus, psi).squaredNorm();
        result.samples.push_back({t, fid, eta});
    };

    if (basis.dim() <= options.eigen_cap) {
        const auto prop = make_eigen_propagator(h_sector, initial.amplitudes);
        for (double t : times) {
            const Eigen::VectorXcd psi = prop.at(t);
            if (std::abs(psi.norm() - 1.0) > options.norm_drift_tol) {
                throw NumericalBlowup("state norm drifted during eigendecomposition propagation");
            }
            sample(t, psi);
        }
        // exact time average: degeneracy classes of the sector spectrum
        const Eigen::VectorXcd sym_coeffs = prop.modes.transpose() * sym;
        double avg = 0.0;
        Eigen::Index k = 0;
        const auto dim = prop.energies.size();
        while (k < dim) {
            std::complex<double> cls = std::conj(sym_coeffs[k]) * prop.coeffs[k];
            Eigen::Index j = k + 1;
            while (j < dim && prop.energies[j] - prop.energies[j - 1] < 1e-9) {
                cls += std::conj(sym_coeffs[j]) * prop.coeffs[j];
                ++j;
            }
            avg += std::norm(cls);
            k = j;
        }
        result.fidelity_avg = avg;
        result.exact_average = true;
    } else {
        ChebyshevPropagator prop(h_sector, options.norm_drift_tol);
        Eigen::VectorXcd psi = initial.amplitudes;
        double t_prev = 0.0;
        for (double t : times) {
            if (t < t_prev) throw ValidationError("time grid must be nondecreasing");
            if (t > t_prev) prop.step(psi, t - t_prev);
            t_prev = t;
            sample(t, psi);
        }
        // finite-window trapezoid over the sampled fidelities
        double area = 0.0;
        for (std::size_t i = 0; i + 1 < result.samples.size(); ++i) {
            area += 0.5 * (result.samples[i].fidelity + result.samples[i + 1].fidelity) *
                    (result.samples[i + 1].t - result.samples[i].t);
        }
        const double span = result.samples.back().t - result.samples.front().t;
        result.fidelity_avg = span > 0.0 ? area / span : result.samples.front().fidelity;
        result.exact_average = false;
    }
    return result;
}

namespace {

struct BlockEvolution {
    std::vector<SectorBasis> bases;
    std::vector<Eigen::SparseMatrix<double>> hams;
    std::vector<double> amplitude2;  // |A_n|^2 of the product state per block
};

BlockEvolution prepare_blocks(const DisorderRealization& realization,
                              const InteractionNetwork& net, double theta0,
                              const ExactOptions& options) {
    const std::size_t n = net.size();
    if (realization.size() != n) throw ValidationError("disorder / network size mismatch");
    if (n > options.full_spins_cap) {
        throw DimensionCapError("full evolution capped at " +
                                std::to_string(options.full_spins_cap) + " spins");
    }
    if (!(theta0 >= 0.0 && theta0 <= std::numbers::pi)) {
        throw ValidationError("theta0 must lie in [0,pi]");
    }
    BlockEvolution blocks;
    const double c = std::cos(0.5 * theta0);
    const double s = std::sin(0.5 * theta0);
    for (std::size_t k = 0; k <= n; ++k) {
        const double amp = std::sqrt(binomial(n, k)) * std::pow(c, static_cast<double>(n - k)) *
                           std::pow(s, static_cast<double>(k));
        blocks.amplitude2.push_back(amp * amp);
        blocks.bases.push_back(SectorBasis::build(n, k, options.sector_dimension_cap));
        blocks.hams.push_back(build_sector_hamiltonian(realization, net, blocks.bases.back()));
    }
    return blocks;
}

}  // namespace

CoherenceTrace full_evolve(const DisorderRealization& realization, const InteractionNetwork& net,
                           double theta0, double phi0, const std::vector<double>& times,
                           const ExactOptions& options) {
    (void)phi0;  // a global phase per block; cancels in eta
    if (times.empty()) throw ValidationError("time grid is empty");
    auto blocks = prepare_blocks(realization, net, theta0, options);
    const std::size_t n = net.size();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);

    CoherenceTrace trace;
    trace.times = times;
    trace.eta.assign(times.size(), 0.0);
    trace.meta = {n,
                  realization.distribution.sigma,
                  to_string(realization.distribution.family),
                  net.geometry().family,
                  theta0,
                  1.0,
                  times.size() > 1 ? times[1] - times[0] : 0.0,
                  realization.seed,
                  to_string(realization.scheme)};

    for (std::size_t k = 1; k <= n; ++k) {  // k = 0 block has S^- |0> = 0
        if (blocks.amplitude2[k] < 1e-18) continue;
        const auto& basis = blocks.bases[k];
        const auto& basis_minus = blocks.bases[k - 1];
        const auto prop = make_eigen_propagator(blocks.hams[k], symmetric_state(basis).amplitudes);
        for (std::size_t it = 0; it < times.size(); ++it) {
            const Eigen::VectorXcd psi = prop.at(times[it]);
            trace.eta[it] += blocks.amplitude2[k] * 4.0 / n2 *
                             apply_lowering(basis, basis_minus, psi).squaredNorm();
        }
    }
    return trace;
}

std::vector<double> full_evolve_block_norms(const DisorderRealization& realization,
                                            const InteractionNetwork& net, double theta0,
                                            double phi0, double t_final,
                                            const ExactOptions& options) {
    (void)phi0;
    auto blocks = prepare_blocks(realization, net, theta0, options);
    std::vector<double> norms;
    for (std::size_t k = 0; k <= net.size(); ++k) {
        if (blocks.amplitude2[k] < 1e-300) {
            norms.push_back(0.0);
            continue;
        }
        const auto prop =
            make_eigen_propagator(blocks.hams[k], symmetric_state(blocks.bases[k]).amplitudes);
        norms.push_back(std::sqrt(blocks.amplitude2[k]) * prop.at(t_final).norm());
    }
    return norms;
}

}  // namespace supercoh
