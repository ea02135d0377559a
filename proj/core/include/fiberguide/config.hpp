#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "fiberguide/dynamics.hpp"
#include "fiberguide/ensemble.hpp"
#include "fiberguide/observables.hpp"
#include "fiberguide/potential.hpp"
#include "fiberguide/units.hpp"

namespace fiberguide {

/// Peak density of the molasses, atoms/m^3 (1.5e11 cm^-3).
inline constexpr double kMolassesPeakDensity = 1.5e17;

/// Default cloud geometry holding atoms at the molasses peak density.
CloudConfig default_molasses_cloud();

struct DensityWindow {
    /// The density profile is the average of `snapshots` equally spaced
    /// snapshots over [start, stop]. One snapshot means a single instant.
    double start = 30e-3; // s
    double stop = 30e-3;  // s
    std::size_t snapshots = 1;
    double radial_bin = 0.25e-6; // m
    double axial_bin = 1e-3;     // m

    std::vector<double> times() const;
    void validate(double t_max) const;
};

struct ObservablesConfig {
    double flux_bin = kDefaultFluxBin; // s
    DensityWindow density;
    double photons_per_atom = kPhotonsPerAtom;
    bool photon_noise = true;
};

struct ScenarioConfig {
    AtomSpecies species = rubidium85();
    FieldConfig field;
    CloudConfig cloud = default_molasses_cloud();
    std::optional<CloudConfig> reservoir_cloud;
    IntegratorParams integrator;
    std::size_t n_trajectories = 1000;
    /// Simulated trajectories for the reservoir cloud; 0 means n_trajectories.
    std::size_t reservoir_trajectories = 0;
    std::uint64_t master_seed = 1;
    std::filesystem::path output_dir = "out";
    /// Worker threads; 0 selects the hardware concurrency.
    unsigned workers = 0;
    ObservablesConfig observables;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses a YAML scenario. Every quantity carries a unit suffix ("8.2 mK",
/// "4.5 um"); unknown keys and malformed values throw ConfigError naming the
/// dotted key path. Absent keys keep their defaults.
ScenarioConfig parse_scenario_config(std::string_view yaml_text, const std::string& origin = "<memory>");
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

} // namespace fiberguide
