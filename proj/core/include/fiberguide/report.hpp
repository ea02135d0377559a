#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fiberguide/csv.hpp"
#include "fiberguide/fit.hpp"
#include "fiberguide/scenario.hpp"

namespace fiberguide {

// --- CSV schemas ------------------------------------------------------------

CsvTable flux_csv(const FluxHistogram& h);
CsvTable outcomes_csv(std::span<const TrajectoryOutcome> outcomes);
/// One row per (r, z) bin, coordinates at bin centres.
CsvTable density_csv(const DensityProfile& profile);
CsvTable photons_csv(std::span<const PhotonBin> photons);
/// Failed rows keep their depth and leave the observables empty.
CsvTable sweep_csv(const SweepTable& table);

/// Inverse of sweep_csv. Empty cells read as NaN; row errors are not stored
/// in the CSV and come back as "no data".
SweepTable sweep_from_csv(const CsvTable& csv);
std::vector<FluxBin> flux_from_csv(const CsvTable& csv);

// --- checks -----------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SweepAnalysis {
    std::optional<FitResult> transit_fit;   // power law, depth in mK
    std::optional<FitResult> flux_fit;      // power law, depth in mK
    std::optional<FitResult> threshold_fit; // sqrt threshold on peak flux, mK
    std::optional<FitResult> guided_fit;    // linear, depth in mK
    double guided_constant_norm = 0.0;
    std::vector<std::string> notes;         // fit failures and skipped rows
    std::vector<Check> checks;
};

/// Fits the scaling laws and evaluates the sweep-level checks. Power-law
/// checks apply to barrier-free sweeps, the threshold check when a barrier
/// height is known.
SweepAnalysis analyze_sweep(const SweepTable& table);

std::vector<Check> scenario_checks(const ScenarioConfig& cfg, const ScenarioResult& result);

std::string sweep_summary(const SweepTable& table, const SweepAnalysis& analysis);
std::string scenario_summary(const ScenarioConfig& cfg, const ScenarioResult& result);

// --- file emission ----------------------------------------------------------

/// Writes flux.csv, outcomes.csv, density.csv, photons.csv and summary.txt.
void write_report(const ScenarioConfig& cfg, const ScenarioResult& result, const std::filesystem::path& dir);

/// Writes sweep.csv and summary.txt.
void write_report(const SweepTable& table, const std::filesystem::path& dir);

} // namespace fiberguide
