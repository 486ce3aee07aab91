#include "supercoh/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace supercoh {

BlochEnsemble init_coherent(std::size_t n, double r0, double theta0, double phi0) {
    if (n < 1) throw ValidationError("ensemble needs n >= 1");
    if (!(r0 >= 0.0 && r0 <= 1.0)) throw ValidationError("purity r0 must lie in [0,1]");
    if (!(theta0 >= 0.0 && theta0 <= std::numbers::pi)) {
        throw ValidationError("polar angle theta0 must lie in [0,pi]");
    }
    BlochEnsemble ens;
    ens.r0 = r0;
    ens.x.assign(n, r0 * std::sin(theta0) * std::cos(phi0));
    ens.y.assign(n, r0 * std::sin(theta0) * std::sin(phi0));
    ens.z.assign(n, -r0 * std::cos(theta0));
    return ens;
}

CollectiveField collective_field(const BlochEnsemble& ensemble) noexcept {
    double sx = 0.0, sy = 0.0;
    for (double v : ensemble.x) sx += v;
    for (double v : ensemble.y) sy += v;
    const double n = static_cast<double>(ensemble.size());
    const double re = sx / n, im = -sy / n;
    return {std::hypot(re, im), std::atan2(im, re)};
}

double total_sz(const BlochEnsemble& ensemble) noexcept {
    double s = 0.0;
    for (double v : ensemble.z) s += v;
    return s;
}

namespace {

struct Csr {
    std::vector<std::size_t> ptr;
    std::vector<std::int32_t> idx;
    std::vector<double> val;
};

Csr build_csr(const InteractionNetwork& net) {
    const std::size_t n = net.size();
    Csr csr;
    csr.ptr.assign(n + 1, 0);
    for (const auto& e : net.edges()) {
        ++csr.ptr[static_cast<std::size_t>(e.i) + 1];
        ++csr.ptr[static_cast<std::size_t>(e.j) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) csr.ptr[i + 1] += csr.ptr[i];
    csr.idx.resize(csr.ptr[n]);
    csr.val.resize(csr.ptr[n]);
    std::vector<std::size_t> fill(csr.ptr.begin(), csr.ptr.end() - 1);
    for (const auto& e : net.edges()) {
        csr.idx[fill[static_cast<std::size_t>(e.i)]] = e.j;
        csr.val[fill[static_cast<std::size_t>(e.i)]++] = e.weight;
        csr.idx[fill[static_cast<std::size_t>(e.j)]] = e.i;
        csr.val[fill[static_cast<std::size_t>(e.j)]++] = e.weight;
    }
    return csr;
}

// Local transverse field h_i = sum_j J_ij (x_j, y_j), no self term.
struct FieldKernel {
    enum class Kind { None, AllToAll, Sparse };

    Kind kind = Kind::None;
    double sfac = -1.0;  // sign / N for the all-to-all path
    std::size_t n = 0;
    Csr csr;

    static FieldKernel none(std::size_t n) { return {Kind::None, 0.0, n, {}}; }
    static FieldKernel all_to_all(std::size_t n, Sign sign) {
        return {Kind::AllToAll, sign_factor(sign) / static_cast<double>(n), n, {}};
    }
    static FieldKernel sparse(const InteractionNetwork& net) {
        return {Kind::Sparse, 0.0, net.size(), build_csr(net)};
    }

    void operator()(const std::vector<double>& x, const std::vector<double>& y,
                    std::vector<double>& hx, std::vector<double>& hy) const {
        switch (kind) {
            case Kind::None:
                std::fill(hx.begin(), hx.end(), 0.0);
                std::fill(hy.begin(), hy.end(), 0.0);
                break;
            case Kind::AllToAll: {
                double sx = 0.0, sy = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    sx += x[i];
                    sy += y[i];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    hx[i] = sfac * (sx - x[i]);
                    hy[i] = sfac * (sy - y[i]);
                }
                break;
            }
            case Kind::Sparse:
                for (std::size_t i = 0; i < n; ++i) {
                    double ax = 0.0, ay = 0.0;
                    for (std::size_t e = csr.ptr[i]; e < csr.ptr[i + 1]; ++e) {
                        ax += csr.val[e] * x[static_cast<std::size_t>(csr.idx[e])];
                        ay += csr.val[e] * y[static_cast<std::size_t>(csr.idx[e])];
                    }
                    hx[i] = ax;
                    hy[i] = ay;
                }
                break;
        }
    }
};

struct State {
    std::vector<double> x, y, z;

    explicit State(std::size_t n) : x(n), y(n), z(n) {}
    explicit State(const BlochEnsemble& e) : x(e.x), y(e.y), z(e.z) {}
};

class Rk4 {
public:
    Rk4(std::size_t n, const std::vector<double>& omega, FieldKernel field)
        : n_(n), omega_(omega), field_(std::move(field)),
          hx_(n), hy_(n), k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

    void step(State& s, double dt) {
        deriv(s, k1_);
        blend(s, k1_, 0.5 * dt);
        deriv(tmp_, k2_);
        blend(s, k2_, 0.5 * dt);
        deriv(tmp_, k3_);
        blend(s, k3_, dt);
        deriv(tmp_, k4_);
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < n_; ++i) {
            s.x[i] += w * (k1_.x[i] + 2.0 * k2_.x[i] + 2.0 * k3_.x[i] + k4_.x[i]);
            s.y[i] += w * (k1_.y[i] + 2.0 * k2_.y[i] + 2.0 * k3_.y[i] + k4_.y[i]);
            s.z[i] += w * (k1_.z[i] + 2.0 * k2_.z[i] + 2.0 * k3_.z[i] + k4_.z[i]);
        }
    }

private:
    // Bloch precession dr_i/dt = B_i x r_i with B_i = (h_i^x, h_i^y, Omega_i).
    void deriv(const State& s, State& d) {
        field_(s.x, s.y, hx_, hy_);
        for (std::size_t i = 0; i < n_; ++i) {
            d.x[i] = -omega_[i] * s.y[i] + hy_[i] * s.z[i];
            d.y[i] = omega_[i] * s.x[i] - hx_[i] * s.z[i];
            d.z[i] = hx_[i] * s.y[i] - hy_[i] * s.x[i];
        }
    }

    void blend(const State& s, const State& k, double h) {
        for (std::size_t i = 0; i < n_; ++i) {
            tmp_.x[i] = s.x[i] + h * k.x[i];
            tmp_.y[i] = s.y[i] + h * k.y[i];
            tmp_.z[i] = s.z[i] + h * k.z[i];
        }
    }

    std::size_t n_;
    std::vector<double> omega_;
    FieldKernel field_;
    std::vector<double> hx_, hy_;
    State k1_, k2_, k3_, k4_, tmp_;
};

double eta_of(const State& s) {
    double sx = 0.0, sy = 0.0;
    for (double v : s.x) sx += v;
    for (double v : s.y) sy += v;
    const double n = static_cast<double>(s.x.size());
    return (sx * sx + sy * sy) / (n * n);
}

void check_purity(const State& s, double r0, double tolerance, double t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double len = std::sqrt(s.x[i] * s.x[i] + s.y[i] * s.y[i] + s.z[i] * s.z[i]);
        worst = std::max(worst, std::abs(len - r0));
    }
    if (worst > tolerance) {
        throw NumericalBlowup("Bloch length drifted by " + std::to_string(worst) + " at t=" +
                              std::to_string(t));
    }
}

CoherenceTrace run(const BlochEnsemble& initial, const DisorderRealization& realization,
                   FieldKernel field, const IntegrationParams& params, const char* geometry,
                   State* final_state) {
    const std::size_t n = initial.size();
    if (realization.size() != n) throw ValidationError("disorder / ensemble size mismatch");
    if (!(params.dt > 0.0) || !(params.t_max > 0.0)) {
        throw ValidationError("integration needs dt > 0 and t_max > 0");
    }
    if (params.record_stride < 1) throw ValidationError("record_stride must be >= 1");

    const auto steps = static_cast<std::size_t>(std::llround(params.t_max / params.dt));
    State s(initial);
    Rk4 rk(n, realization.omegas, std::move(field));

    CoherenceTrace trace;
    trace.times.reserve(steps / params.record_stride + 2);
    trace.eta.reserve(steps / params.record_stride + 2);
    double theta0 = 0.0;
    if (initial.r0 > 0.0 && n > 0) {
        const double transverse = std::hypot(initial.x[0], initial.y[0]);
        theta0 = std::atan2(transverse, -initial.z[0]);
    }
    trace.meta = {n,
                  realization.distribution.sigma,
                  to_string(realization.distribution.family),
                  geometry,
                  theta0,
                  initial.r0,
                  params.dt,
                  realization.seed,
                  to_string(realization.scheme)};

    trace.times.push_back(0.0);
    trace.eta.push_back(eta_of(s));
    for (std::size_t step = 1; step <= steps; ++step) {
        rk.step(s, params.dt);
        if (step % params.record_stride == 0 || step == steps) {
            const double t = static_cast<double>(step) * params.dt;
            if (step % params.record_stride == 0) {
                trace.times.push_back(t);
                trace.eta.push_back(eta_of(s));
            }
            check_purity(s, initial.r0, params.blowup_tolerance, t);
        }
    }
    if (final_state) *final_state = s;
    return trace;
}

}  // namespace

CoherenceTrace integrate(const BlochEnsemble& initial, const DisorderRealization& realization,
                         const MeanFieldAllToAll& coupling, const IntegrationParams& params) {
    if (coupling.n != initial.size()) throw ValidationError("coupling / ensemble size mismatch");
    return run(initial, realization, FieldKernel::all_to_all(coupling.n, coupling.sign), params,
               "all", nullptr);
}

CoherenceTrace integrate(const BlochEnsemble& initial, const DisorderRealization& realization,
                         const InteractionNetwork& net, const IntegrationParams& params) {
    if (net.size() != initial.size()) throw ValidationError("network / ensemble size mismatch");
    FieldKernel field = net.edges().empty() ? FieldKernel::none(net.size())
                                            : FieldKernel::sparse(net);
    return run(initial, realization, std::move(field), params, net.geometry().family.c_str(),
               nullptr);
}

BlochEnsemble integrate_final_state(const BlochEnsemble& initial,
                                    const DisorderRealization& realization,
                                    const InteractionNetwork& net,
                                    const IntegrationParams& params) {
    State s(initial.size());
    FieldKernel field = net.edges().empty() ? FieldKernel::none(net.size())
                                            : FieldKernel::sparse(net);
    run(initial, realization, std::move(field), params, net.geometry().family.c_str(), &s);
    BlochEnsemble out;
    out.r0 = initial.r0;
    out.x = std::move(s.x);
    out.y = std::move(s.y);
    out.z = std::move(s.z);
    return out;
}

double time_average(const CoherenceTrace& trace, double t_transient) {
    const auto& t = trace.times;
    const auto& e = trace.eta;
    if (t.size() < 2) throw ValidationError("trace too short to average");
    auto first = std::lower_bound(t.begin(), t.end(), t_transient) - t.begin();
    if (static_cast<std::size_t>(first) + 1 >= t.size()) {
        throw ValidationError("averaging window [t_transient, t_max] is empty");
    }
    double area = 0.0;
    for (std::size_t i = static_cast<std::size_t>(first); i + 1 < t.size(); ++i) {
        area += 0.5 * (e[i] + e[i + 1]) * (t[i + 1] - t[i]);
    }
    return area / (t.back() - t[static_cast<std::size_t>(first)]);
}

namespace {

std::vector<double> find_peaks(const CoherenceTrace& trace, double t_transient,
                               double prominence_fraction) {
    const auto& t = trace.times;
    const auto& e = trace.eta;
    auto begin = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), t_transient) -
                                          t.begin());
    std::vector<double> peak_times;
    if (begin + 2 >= t.size()) return peak_times;

    double max_eta = 0.0;
    for (std::size_t i = begin; i < e.size(); ++i) max_eta = std::max(max_eta, e[i]);
    const double min_prominence = prominence_fraction * max_eta;

    for (std::size_t i = begin + 1; i + 1 < e.size(); ++i) {
        if (!(e[i] > e[i - 1] && e[i] >= e[i + 1])) continue;
        double left_min = e[i];
        for (std::size_t l = i; l-- > begin;) {
            if (e[l] > e[i]) break;
            left_min = std::min(left_min, e[l]);
        }
        double right_min = e[i];
        for (std::size_t r = i + 1; r < e.size(); ++r) {
            if (e[r] > e[i]) break;
            right_min = std::min(right_min, e[r]);
        }
        if (e[i] - std::max(left_min, right_min) >= min_prominence) peak_times.push_back(t[i]);
    }
    return peak_times;
}

}  // namespace

std::optional<double> oscillation_period(const CoherenceTrace& trace, double t_transient,
                                         double prominence_fraction) {
    const auto peaks = find_peaks(trace, t_transient, prominence_fraction);
    if (peaks.size() < 2) return std::nullopt;
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

std::size_t count_oscillation_peaks(const CoherenceTrace& trace, double t_transient,
                                    double prominence_fraction) {
    return find_peaks(trace, t_transient, prominence_fraction).size();
}

double meanfield_energy(const BlochEnsemble& ensemble, const DisorderRealization& realization,
                        const InteractionNetwork& net) {
    if (ensemble.size() != realization.size() || ensemble.size() != net.size()) {
        throw ValidationError("size mismatch in meanfield_energy");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < ensemble.size(); ++i) e += realization.omegas[i] * ensemble.z[i];
    e *= 0.5;
    for (const auto& edge : net.edges()) {
        const auto i = static_cast<std::size_t>(edge.i);
        const auto j = static_cast<std::size_t>(edge.j);
        e += 0.5 * edge.weight *
             (ensemble.x[i] * ensemble.x[j] + ensemble.y[i] * ensemble.y[j]);
    }
    return e;
}

}  // namespace supercoh
