#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fiberguide/config.hpp"
#include "fiberguide/observables.hpp"

namespace fiberguide {

/// One sampled cloud and the slice of outcomes it produced.
struct SourceResult {
    std::string name;       // "molasses" or "reservoir"
    std::size_t first = 0;  // index of its first outcome
    std::size_t count = 0;
    double scale = 0.0;     // physical atoms per trajectory
    FluxHistogram flux;
    std::optional<TransitStats> transit;
};

struct PhotonBin {
    double t_start = 0.0;
    double atoms = 0.0;
    double photons = 0.0;
};

struct ScenarioResult {
    std::vector<TrajectoryOutcome> outcomes; // molasses first, then reservoir
    std::vector<SourceResult> sources;
    FluxHistogram flux;                      // all sources combined
    DensityProfile density;                  // averaged over the density window
    double optical_depth = 0.0;
    double guided_count = 0.0;               // physical atoms transmitted
    std::vector<PhotonBin> photons;          // detector signal per flux bin
    std::size_t failed = 0;

    const SourceResult& primary() const { return sources.front(); }
};

/// Samples the cloud(s), propagates, and reduces to observables. Does not
/// touch the file system; see write_scenario_outputs.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct SweepRow {
    double depth = 0.0;         // J
    double guided_count = 0.0;
    double peak_flux = 0.0;     // atoms/s
    double mean_transit = 0.0;  // s, NaN when nothing was transmitted
    double peak_density = 0.0;  // atoms/m^3
    std::string error;          // non-empty when this depth failed

    bool ok() const noexcept { return error.empty(); }
};

struct SweepTable {
    std::vector<SweepRow> rows;
    /// Barrier height of the swept configuration, NaN when the barrier is off.
    double barrier_height = std::numeric_limits<double>::quiet_NaN();
};

/// Copy of `cfg` with the guide power set for the requested depth.
ScenarioConfig with_depth(const ScenarioConfig& cfg, double depth);

/// Runs one scenario per depth. Every row reuses the same master seed, so
/// each depth sees the same initial cloud and random streams. Depths must be
/// non-empty, >= 0 and strictly increasing. A failing depth is recorded in
/// its row and does not stop the sweep.
SweepTable sweep_depth(const ScenarioConfig& cfg, std::span<const double> depths);

SweepRow summarize(const ScenarioResult& result, double depth);

} // namespace fiberguide
