#pragma once

// Parameter scans with deterministic disorder averaging: eta-bar curves, phase
// maps, period curves, gap/fidelity curves, and the network-geometry scan.
// Tasks are embarrassingly parallel; merging is keyed by grid index so results
// are bitwise-identical for any worker count.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "supercoh/consistency.hpp"
#include "supercoh/disorder.hpp"
#include "supercoh/meanfield.hpp"
#include "supercoh/network.hpp"
#include "supercoh/spectral.hpp"

namespace supercoh {

enum class SweepKind { EtaVsSigma, PhaseMap, PeriodVsSigma, GapVsSigma, NetworkScan, ExponentFit };
enum class Engine { MeanField, SelfConsistent, Spectral, Exact };

const char* to_string(SweepKind kind) noexcept;
const char* to_string(Engine engine) noexcept;
SweepKind sweep_kind_from_string(const std::string& name);
Engine engine_from_string(const std::string& name);

struct SweepJob {
    SweepKind kind = SweepKind::EtaVsSigma;
    Engine engine = Engine::MeanField;

    DistFamily family = DistFamily::Uniform;
    std::vector<double> sigmas;
    std::vector<double> theta0s;  // PhaseMap second axis; otherwise {theta0}
    double theta0 = 1.5707963267948966;
    double phi0 = 0.0;
    double r0 = 1.0;

    std::size_t n = 1000;
    SamplingScheme scheme = SamplingScheme::Stratified;
    NetworkSpec network;                 // single-network kinds
    std::vector<NetworkSpec> networks;   // NetworkScan grid

    std::size_t realizations = 1;
    std::uint64_t base_seed = 1;

    IntegrationParams integration;
    double t_transient = 50.0;
    SolverOptions solver;
    SpectralOptions spectral;

    std::size_t workers = 0;  // 0 = hardware concurrency
};

struct SweepRow {
    std::vector<double> axis;
    std::string label;            // network spec for NetworkScan rows
    std::vector<double> values;   // NaN marks an absent value
    std::vector<double> stderrs;  // empty unless IID with R > 1
    std::size_t realizations = 1;
    std::string flag;   // e.g. "few-periods", "no-period", "extended"
    std::string error;  // nonempty when every realization failed
};

struct SweepResult {
    std::vector<std::string> axis_names;
    std::vector<std::string> value_names;
    std::vector<SweepRow> rows;
    std::map<std::string, std::string> provenance;
};

// Validates engine/kind compatibility and the stratified-replicate rule
// (deterministic draws make R > 1 meaningless), then runs the scan.
SweepResult run_sweep(const SweepJob& job);

// Sample mean and standard error of fn(seed_r) over r = 0..R-1 with
// seed_r = base_seed ^ r. stderr is absent when R = 1.
std::pair<double, std::optional<double>> disorder_average(
    const std::function<double(std::uint64_t)>& fn, std::size_t realizations,
    std::uint64_t base_seed);

// Deterministic work pool: fn(i) for i in [0, count), results merged by index.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace supercoh
