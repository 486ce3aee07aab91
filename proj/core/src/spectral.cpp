#include "supercoh/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

namespace supercoh {

Eigen::MatrixXd build_matrix(const DisorderRealization& realization,
                             const InteractionNetwork& net) {
    const std::size_t n = net.size();
    if (realization.size() != n) throw ValidationError("disorder / network size mismatch");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = realization.omegas[i];
    }
    for (const auto& e : net.edges()) {
        m(e.i, e.j) = e.weight;
        m(e.j, e.i) = e.weight;
    }
    return m;
}

namespace {

Eigen::VectorXd symmetric_weights(const Eigen::MatrixXd& modes) {
    const auto n = modes.rows();
    Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd overlap = modes.transpose() * u;
    return overlap.array().square();
}

SpectralMeta meta_from(const DisorderRealization& realization, const InteractionNetwork& net) {
    return {net.size(),
            realization.distribution.sigma,
            to_string(realization.distribution.family),
            net.geometry().family + (net.geometry().params.empty() ? "" : ":" + net.geometry().params),
            net.sign(),
            realization.seed,
            to_string(realization.scheme)};
}

// Lanczos with full reorthogonalization, started from the symmetric vector so
// the isolated mode converges first. Returns Ritz values/weights only.
SpectralResult lanczos_extremal(const DisorderRealization& realization,
                                const InteractionNetwork& net, const SpectralMeta& meta,
                                const SpectralOptions& opt) {
    const auto n = static_cast<Eigen::Index>(net.size());
    Eigen::SparseMatrix<double> h(n, n);
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(net.edges().size() * 2 + static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            trips.emplace_back(i, i, realization.omegas[static_cast<std::size_t>(i)]);
        }
        for (const auto& e : net.edges()) {
            trips.emplace_back(e.i, e.j, e.weight);
            trips.emplace_back(e.j, e.i, e.weight);
        }
        h.setFromTriplets(trips.begin(), trips.end());
    }

    const std::size_t m = std::min<std::size_t>(opt.lanczos_iterations, net.size());
    Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(m));
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(m));
    Eigen::VectorXd beta(static_cast<Eigen::Index>(m));
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd w(n);
    std::size_t built = 0;
    for (std::size_t j = 0; j < m; ++j) {
        basis.col(static_cast<Eigen::Index>(j)) = v;
        ++built;
        w = h * v;
        alpha[static_cast<Eigen::Index>(j)] = v.dot(w);
        w -= alpha[static_cast<Eigen::Index>(j)] * v;
        if (j > 0) w -= beta[static_cast<Eigen::Index>(j - 1)] * basis.col(static_cast<Eigen::Index>(j - 1));
        // full reorthogonalization pass
        w -= basis.leftCols(static_cast<Eigen::Index>(j + 1)) *
             (basis.leftCols(static_cast<Eigen::Index>(j + 1)).transpose() * w);
        const double nb = w.norm();
        beta[static_cast<Eigen::Index>(j)] = nb;
        if (nb < 1e-12) break;
        v = w / nb;
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(built),
                                                static_cast<Eigen::Index>(built));
    for (std::size_t j = 0; j < built; ++j) {
        tri(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
            alpha[static_cast<Eigen::Index>(j)];
        if (j + 1 < built) {
            tri(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(j)) =
                beta[static_cast<Eigen::Index>(j)];
            tri(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j + 1)) =
                beta[static_cast<Eigen::Index>(j)];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    if (es.info() != Eigen::Success) throw DiagonalizationFailure("Lanczos tridiagonal solve failed");

    SpectralResult result;
    result.meta = meta;
    result.full_spectrum = false;
    result.energies = es.eigenvalues();
    // start vector is u_sym, so the weight of a Ritz pair is its first component squared
    result.weights = es.eigenvectors().row(0).transpose().array().square();
    result.gap = std::nullopt;
    return result;
}

}  // namespace

SpectralResult diagonalize(const Eigen::MatrixXd& matrix, const SpectralMeta& meta,
                           const SpectralOptions& options) {
    if (matrix.rows() != matrix.cols()) throw ValidationError("matrix must be square");
    if (!matrix.isApprox(matrix.transpose(), 1e-12)) {
        throw ValidationError("matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
    if (es.info() != Eigen::Success) throw DiagonalizationFailure("dense eigensolver failed");
    SpectralResult result;
    result.energies = es.eigenvalues();
    result.modes = es.eigenvectors();
    result.weights = symmetric_weights(result.modes);
    result.meta = meta;
    result.meta.n = static_cast<std::size_t>(matrix.rows());
    result.full_spectrum = true;
    result.gap = detect_gap(result, options);
    return result;
}

SpectralResult analyze(const DisorderRealization& realization, const InteractionNetwork& net,
                       const SpectralOptions& options) {
    const SpectralMeta meta = meta_from(realization, net);
    if (net.size() <= options.dense_cap) {
        return diagonalize(build_matrix(realization, net), meta, options);
    }
    SpectralResult result = lanczos_extremal(realization, net, meta, options);
    result.gap = detect_gap(result, options);
    return result;
}

std::optional<GapInfo> detect_gap(const SpectralResult& result, const SpectralOptions& options) {
    const auto n = result.energies.size();
    if (n < 3) return std::nullopt;

    const bool attractive = result.meta.sign == Sign::Attractive;
    const Eigen::Index iso = attractive ? 0 : n - 1;
    const Eigen::Index edge = attractive ? 1 : n - 2;
    const double gap = std::abs(result.energies[edge] - result.energies[iso]);

    // median adjacent spacing inside the band (everything but the candidate)
    std::vector<double> spacing;
    spacing.reserve(static_cast<std::size_t>(n - 2));
    const Eigen::Index lo = attractive ? 1 : 0;
    const Eigen::Index hi = attractive ? n - 1 : n - 2;
    for (Eigen::Index k = lo; k < hi; ++k) {
        spacing.push_back(result.energies[k + 1] - result.energies[k]);
    }
    auto mid = spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2);
    std::nth_element(spacing.begin(), mid, spacing.end());
    const double median = *mid;

    if (gap <= options.gap_spacing_factor * median) return std::nullopt;
    if (result.weights[iso] <= options.weight_threshold) return std::nullopt;
    return GapInfo{gap, static_cast<std::size_t>(iso)};
}

CoherenceTrace coherence_trace_hp(const SpectralResult& result, const std::vector<double>& times) {
    if (times.empty()) throw ValidationError("time grid is empty");
    if (!result.full_spectrum) {
        throw ValidationError("coherence trace needs the full spectrum (dense path)");
    }
    CoherenceTrace trace;
    trace.times = times;
    trace.eta.resize(times.size());
    const auto n = result.energies.size();
    for (std::size_t it = 0; it < times.size(); ++it) {
        const double t = times[it];
        std::complex<double> amp = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            amp += result.weights[k] *
                   std::exp(std::complex<double>(0.0, -result.energies[k] * t));
        }
        trace.eta[it] = std::norm(amp);
    }
    trace.meta.n = result.meta.n;
    trace.meta.sigma = result.meta.sigma;
    trace.meta.dist = result.meta.dist;
    trace.meta.geometry = result.meta.geometry;
    trace.meta.dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    trace.meta.seed = result.meta.seed;
    trace.meta.scheme = result.meta.scheme;
    return trace;
}

double relative_coherence_avg(const SpectralResult& result, const SpectralOptions& options) {
    if (!result.full_spectrum) {
        const double w = result.weights[result.meta.sign == Sign::Attractive
                                            ? 0
                                            : result.weights.size() - 1];
        const double rest = 1.0 - w;
        return w * w + rest * rest / (static_cast<double>(result.meta.n) - 1.0);
    }
    // exact time average: degenerate levels beat against each other forever
    double total = 0.0;
    const auto n = result.energies.size();
    Eigen::Index k = 0;
    while (k < n) {
        double class_weight = result.weights[k];
        Eigen::Index j = k + 1;
        while (j < n && result.energies[j] - result.energies[j - 1] < options.degeneracy_tol) {
            class_weight += result.weights[j];
            ++j;
        }
        total += class_weight * class_weight;
        k = j;
    }
    return total;
}

double fidelity_n(const SpectralResult& result, int n) {
    if (n < 1) throw ValidationError("excitation number n must be >= 1");
    if (!result.gap) throw NoIsolatedStateError("no isolated supercoherent state detected");
    const double w = result.weights[static_cast<Eigen::Index>(result.gap->isolated_index)];
    return std::pow(w * w, n);
}

double ladder_spacing(double omega_mean) noexcept { return omega_mean; }

std::vector<double> direct_sum_spectrum(const std::vector<double>& single_levels, int n) {
    if (n < 1) throw ValidationError("excitation number n must be >= 1");
    std::vector<double> sums{0.0};
    for (int step = 0; step < n; ++step) {
        std::vector<double> next;
        next.reserve(sums.size() * single_levels.size());
        for (double base : sums) {
            for (double level : single_levels) next.push_back(base + level);
        }
        sums = std::move(next);
    }
    std::sort(sums.begin(), sums.end());
    return sums;
}

}  // namespace supercoh
