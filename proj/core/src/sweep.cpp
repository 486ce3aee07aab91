#include "supercoh/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace supercoh {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(SweepKind kind) noexcept {
    switch (kind) {
        case SweepKind::EtaVsSigma: return "eta-vs-sigma";
        case SweepKind::PhaseMap: return "phase-map";
        case SweepKind::PeriodVsSigma: return "period";
        case SweepKind::GapVsSigma: return "gap";
        case SweepKind::NetworkScan: return "network-scan";
        case SweepKind::ExponentFit: return "exponent";
    }
    return "?";
}

const char* to_string(Engine engine) noexcept {
    switch (engine) {
        case Engine::MeanField: return "meanfield";
        case Engine::SelfConsistent: return "selfconsistent";
        case Engine::Spectral: return "spectral";
        case Engine::Exact: return "exact";
    }
    return "?";
}

SweepKind sweep_kind_from_string(const std::string& name) {
    if (name == "eta-vs-sigma") return SweepKind::EtaVsSigma;
    if (name == "phase-map") return SweepKind::PhaseMap;
    if (name == "period") return SweepKind::PeriodVsSigma;
    if (name == "gap") return SweepKind::GapVsSigma;
    if (name == "network-scan") return SweepKind::NetworkScan;
    if (name == "exponent") return SweepKind::ExponentFit;
    throw ValidationError("unknown sweep kind: " + name);
}

Engine engine_from_string(const std::string& name) {
    if (name == "meanfield") return Engine::MeanField;
    if (name == "selfconsistent") return Engine::SelfConsistent;
    if (name == "spectral") return Engine::Spectral;
    if (name == "exact") return Engine::Exact;
    throw ValidationError("unknown engine: " + name);
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::pair<double, std::optional<double>> disorder_average(
    const std::function<double(std::uint64_t)>& fn, std::size_t realizations,
    std::uint64_t base_seed) {
    if (realizations < 1) throw ValidationError("disorder_average needs R >= 1");
    std::vector<double> values(realizations);
    for (std::size_t r = 0; r < realizations; ++r) {
        values[r] = fn(base_seed ^ static_cast<std::uint64_t>(r));
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(realizations);
    if (realizations == 1) return {mean, std::nullopt};
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(realizations - 1);
    return {mean, std::sqrt(var / static_cast<double>(realizations))};
}

namespace {

struct MeanFieldOutcome {
    double eta_bar = kNan;
    std::optional<double> period;
    std::size_t peaks = 0;
    std::string flag;
};

CoherenceTrace integrate_dispatch(const SweepJob& job, const DisorderRealization& realization,
                                  double theta0, std::uint64_t seed,
                                  const IntegrationParams& params) {
    const BlochEnsemble initial = init_coherent(job.n, job.r0, theta0, job.phi0);
    if (job.network.family == NetworkSpec::Family::All) {
        return integrate(initial, realization, MeanFieldAllToAll{job.n, job.network.sign}, params);
    }
    const InteractionNetwork net = job.network.build(job.n, seed);
    return integrate(initial, realization, net, params);
}

// One mean-field grid point. A row whose averaging window holds fewer than 5
// oscillation periods reruns once with 4x t_max before being flagged.
MeanFieldOutcome run_meanfield_point(const SweepJob& job, double sigma, double theta0,
                                     std::uint64_t seed) {
    const FrequencyDistribution dist(job.family, sigma);
    const DisorderRealization realization = sample(dist, job.n, job.scheme, seed);

    IntegrationParams params = job.integration;
    MeanFieldOutcome out;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const CoherenceTrace trace = integrate_dispatch(job, realization, theta0, seed, params);
        out.peaks = count_oscillation_peaks(trace, job.t_transient);
        out.eta_bar = time_average(trace, job.t_transient);
        out.period = oscillation_period(trace, job.t_transient);
        if (out.peaks >= 5) break;
        if (attempt == 0) {
            params.t_max *= 4.0;
            out.flag = "extended";
        } else {
            out.flag = out.flag.empty() ? "few-periods" : out.flag + ",few-periods";
        }
    }
    return out;
}

struct SpectralOutcome {
    double e_gap = kNan;
    bool detected = false;
    double rel_coherence = kNan;
    double w_iso = kNan;
    double connectivity = kNan;
};

SpectralOutcome run_spectral_point(const SweepJob& job, double sigma, const NetworkSpec& spec,
                                   std::uint64_t seed) {
    const std::size_t n = spec.vertex_count(job.n);
    const FrequencyDistribution dist(job.family, sigma);
    const DisorderRealization realization = sample(dist, n, job.scheme, seed);
    const InteractionNetwork net = spec.build(n, seed);
    const SpectralResult result = analyze(realization, net, job.spectral);

    SpectralOutcome out;
    out.connectivity = net.connectivity();
    out.rel_coherence = relative_coherence_avg(result, job.spectral);
    const Eigen::Index iso =
        net.sign() == Sign::Attractive ? 0 : static_cast<Eigen::Index>(result.weights.size()) - 1;
    out.w_iso = result.weights[iso];
    if (result.gap) {
        out.detected = true;
        out.e_gap = result.gap->e_gap;
    }
    return out;
}

struct Accumulator {
    std::vector<std::vector<double>> samples;  // per column

    explicit Accumulator(std::size_t columns) : samples(columns) {}

    void add(std::size_t column, double value) {
        if (std::isfinite(value)) samples[column].push_back(value);
    }

    std::pair<double, double> stats(std::size_t column) const {
        const auto& v = samples[column];
        if (v.empty()) return {kNan, kNan};
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) return {mean, kNan};
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return {mean, std::sqrt(var / static_cast<double>(v.size()))};
    }
};

void validate(const SweepJob& job) {
    if (job.realizations < 1) throw ValidationError("sweep needs realizations >= 1");
    if (job.scheme == SamplingScheme::Stratified && job.realizations > 1) {
        throw ValidationError(
            "stratified draws are deterministic; R > 1 would average identical replicates");
    }
    switch (job.kind) {
        case SweepKind::EtaVsSigma:
        case SweepKind::PhaseMap:
            if (job.engine != Engine::MeanField && job.engine != Engine::SelfConsistent) {
                throw ValidationError("eta-vs-sigma / phase-map need the meanfield or selfconsistent engine");
            }
            break;
        case SweepKind::PeriodVsSigma:
            if (job.engine != Engine::MeanField) {
                throw ValidationError("the period sweep needs the meanfield engine");
            }
            break;
        case SweepKind::GapVsSigma:
        case SweepKind::NetworkScan:
            if (job.engine != Engine::Spectral) {
                throw ValidationError("gap / network-scan sweeps need the spectral engine");
            }
            break;
        case SweepKind::ExponentFit:
            if (job.engine != Engine::SelfConsistent) {
                throw ValidationError("the exponent fit needs the selfconsistent engine");
            }
            break;
    }
    if (job.kind == SweepKind::NetworkScan) {
        if (job.networks.empty()) throw ValidationError("network scan needs a network grid");
        if (job.sigmas.size() != 1) throw ValidationError("network scan uses a single sigma");
    } else if (job.sigmas.empty()) {
        throw ValidationError("sweep needs a nonempty sigma grid");
    }
    if (job.kind == SweepKind::PhaseMap && job.theta0s.empty()) {
        throw ValidationError("phase map needs a theta0 grid");
    }
}

std::map<std::string, std::string> provenance_of(const SweepJob& job) {
    std::map<std::string, std::string> p;
    p["kind"] = to_string(job.kind);
    p["engine"] = to_string(job.engine);
    p["dist"] = to_string(job.family);
    p["n"] = std::to_string(job.n);
    p["scheme"] = to_string(job.scheme);
    p["theta0"] = std::to_string(job.theta0);
    p["phi0"] = std::to_string(job.phi0);
    p["r0"] = std::to_string(job.r0);
    p["realizations"] = std::to_string(job.realizations);
    p["base_seed"] = std::to_string(job.base_seed);
    p["t_max"] = std::to_string(job.integration.t_max);
    p["dt"] = std::to_string(job.integration.dt);
    p["t_transient"] = std::to_string(job.t_transient);
    p["network"] = job.network.canonical();
    std::ostringstream sig;
    for (std::size_t i = 0; i < job.sigmas.size(); ++i) sig << (i ? " " : "") << job.sigmas[i];
    p["sigmas"] = sig.str();
    if (!job.networks.empty()) {
        std::ostringstream nets;
        for (std::size_t i = 0; i < job.networks.size(); ++i) {
            nets << (i ? " " : "") << job.networks[i].canonical();
        }
        p["networks"] = nets.str();
    }
    return p;
}

}  // namespace

SweepResult run_sweep(const SweepJob& job) {
    validate(job);

    SweepResult result;
    result.provenance = provenance_of(job);

    const bool iid = job.scheme == SamplingScheme::IID;
    const std::size_t R = job.realizations;

    // Grid points: (sigma [, theta0]) or network index.
    struct Point {
        double sigma;
        double theta0;
        std::size_t network_index;
    };
    std::vector<Point> points;
    if (job.kind == SweepKind::NetworkScan) {
        for (std::size_t i = 0; i < job.networks.size(); ++i) {
            points.push_back({job.sigmas.front(), job.theta0, i});
        }
        result.axis_names = {"index"};
        result.value_names = {"rel_coherence", "connectivity", "gap_detected", "e_gap", "w_iso"};
    } else if (job.kind == SweepKind::PhaseMap) {
        for (double s : job.sigmas) {
            for (double t : job.theta0s) points.push_back({s, t, 0});
        }
        result.axis_names = {"sigma", "theta0"};
        result.value_names = {"eta_bar"};
    } else if (job.kind == SweepKind::PeriodVsSigma) {
        for (double s : job.sigmas) points.push_back({s, job.theta0, 0});
        result.axis_names = {"sigma"};
        result.value_names = {"period"};
    } else if (job.kind == SweepKind::GapVsSigma) {
        for (double s : job.sigmas) points.push_back({s, job.theta0, 0});
        result.axis_names = {"sigma"};
        result.value_names = {"e_gap", "rel_coherence", "w_iso", "gap_detected",
                              "e_gap_analytic", "rel_analytic"};
    } else if (job.kind == SweepKind::ExponentFit) {
        result.axis_names = {};
        result.value_names = {"sigma_c", "beta"};
    } else {
        for (double s : job.sigmas) points.push_back({s, job.theta0, 0});
        result.axis_names = {"sigma"};
        result.value_names = {"eta_bar"};
    }

    if (job.kind == SweepKind::ExponentFit) {
        SweepRow row;
        row.realizations = 1;
        try {
            const double sigma_c = critical_sigma(job.family, job.theta0, job.r0, 1e-6, job.solver);
            std::vector<std::pair<double, double>> curve;
            for (double s : job.sigmas) {
                const auto sol = solve_selfconsistent(FrequencyDistribution(job.family, s),
                                                      job.theta0, job.r0, job.solver);
                curve.emplace_back(s, sol.r * sol.r);
            }
            row.values = {sigma_c, fit_critical_exponent(curve, sigma_c)};
        } catch (const Error& err) {
            row.error = err.what();
            row.values = {kNan, kNan};
        }
        result.rows.push_back(std::move(row));
        return result;
    }

    // One task per (grid point, realization); storage keyed by both indices.
    struct Cell {
        std::vector<double> values;
        std::string flag;
        std::string error;
    };
    std::vector<Cell> cells(points.size() * R);

    auto task = [&](std::size_t t) {
        const std::size_t point_index = t / R;
        const std::size_t r = t % R;
        const Point& pt = points[point_index];
        const std::uint64_t seed = job.base_seed ^ static_cast<std::uint64_t>(r);
        Cell& cell = cells[t];
        try {
            switch (job.kind) {
                case SweepKind::EtaVsSigma:
                case SweepKind::PhaseMap: {
                    if (job.engine == Engine::SelfConsistent) {
                        const auto sol = solve_selfconsistent(
                            FrequencyDistribution(job.family, pt.sigma), pt.theta0, job.r0,
                            job.solver);
                        cell.values = {sol.r * sol.r};
                    } else {
                        auto out = run_meanfield_point(job, pt.sigma, pt.theta0, seed);
                        cell.values = {out.eta_bar};
                        cell.flag = out.flag;
                    }
                    break;
                }
                case SweepKind::PeriodVsSigma: {
                    auto out = run_meanfield_point(job, pt.sigma, pt.theta0, seed);
                    cell.values = {out.period ? *out.period : kNan};
                    cell.flag = out.period ? out.flag : "no-period";
                    break;
                }
                case SweepKind::GapVsSigma: {
                    auto out = run_spectral_point(job, pt.sigma, job.network, seed);
                    const bool all = job.network.family == NetworkSpec::Family::All;
                    const auto analytic = all ? analytic_all_to_all(pt.sigma)
                                              : AllToAllAnalytic{kNan, kNan};
                    cell.values = {out.e_gap,
                                   out.rel_coherence,
                                   out.w_iso,
                                   out.detected ? 1.0 : 0.0,
                                   analytic.e_gap,
                                   analytic.rel_coherence};
                    break;
                }
                case SweepKind::NetworkScan: {
                    auto out = run_spectral_point(job, pt.sigma, job.networks[pt.network_index],
                                                  seed);
                    cell.values = {out.rel_coherence, out.connectivity,
                                   out.detected ? 1.0 : 0.0, out.e_gap, out.w_iso};
                    break;
                }
                default:
                    break;
            }
        } catch (const std::exception& err) {
            cell.error = err.what();
        }
    };
    parallel_for(points.size() * R, job.workers, task);

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        SweepRow row;
        if (job.kind == SweepKind::NetworkScan) {
            row.axis = {static_cast<double>(pi)};
            row.label = job.networks[points[pi].network_index].canonical();
        } else if (job.kind == SweepKind::PhaseMap) {
            row.axis = {points[pi].sigma, points[pi].theta0};
        } else {
            row.axis = {points[pi].sigma};
        }

        Accumulator acc(result.value_names.size());
        std::size_t successes = 0;
        std::string last_error;
        for (std::size_t r = 0; r < R; ++r) {
            const Cell& cell = cells[pi * R + r];
            if (!cell.error.empty()) {
                last_error = cell.error;
                continue;
            }
            ++successes;
            for (std::size_t c = 0; c < cell.values.size(); ++c) acc.add(c, cell.values[c]);
            if (!cell.flag.empty() && row.flag.find(cell.flag) == std::string::npos) {
                row.flag = row.flag.empty() ? cell.flag : row.flag + "," + cell.flag;
            }
        }
        row.realizations = successes;
        if (successes == 0) {
            row.error = last_error.empty() ? "all realizations failed" : last_error;
            row.values.assign(result.value_names.size(), kNan);
        } else {
            const std::size_t failures = R - successes;
            if (failures > 0) {
                row.flag = (row.flag.empty() ? "" : row.flag + ",") +
                           ("failures=" + std::to_string(failures));
            }
            for (std::size_t c = 0; c < result.value_names.size(); ++c) {
                const auto [mean, se] = acc.stats(c);
                row.values.push_back(mean);
                if (iid && R > 1) row.stderrs.push_back(se);
            }
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

}  // namespace supercoh
