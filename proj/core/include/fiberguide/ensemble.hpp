#pragma once

#include <cstdint>
#include <vector>

#include "fiberguide/units.hpp"
#include "fiberguide/vec3.hpp"

namespace fiberguide {

/// A Gaussian cloud of atoms. `n_atoms` is the physical atom number the cloud
/// represents; the number of simulated trajectories is chosen separately.
struct CloudConfig {
    double n_atoms = 0.0;
    double temperature = 10e-6;                 // K
    Vec3 center{0.0, 0.0, -200e-6};             // m
    Vec3 sigma_pos{50e-6, 50e-6, 50e-6};        // m
    Vec3 mean_velocity{};                       // m/s

    void validate() const;
};

struct AtomState {
    Vec3 position{};
    Vec3 velocity{};
    double time = 0.0;
    std::uint64_t scatter_count = 0;

    friend bool operator==(const AtomState&, const AtomState&) = default;
};

/// Draws `count` atoms: Gaussian positions about the center and
/// Maxwell-Boltzmann velocities about the mean velocity. Pure function of
/// (cfg, species, count, seed).
std::vector<AtomState> sample_cloud(const CloudConfig& cfg, const AtomSpecies& species,
                                    std::size_t count, std::uint64_t seed);

/// Draws round(cfg.n_atoms) atoms.
std::vector<AtomState> sample_cloud(const CloudConfig& cfg, const AtomSpecies& species,
                                    std::uint64_t seed);

/// Peak density n / ((2 pi)^{3/2} sx sy sz) of the physical cloud, atoms/m^3.
/// Throws DomainError for non-positive n_atoms or any zero width.
double density_weight(const CloudConfig& cfg);

/// Physical atoms represented by each of `simulated` trajectories drawn from
/// the same Gaussian: ratio of physical to simulated peak density.
double scale_factor(const CloudConfig& cfg, std::size_t simulated);

/// Atom number of a Gaussian cloud with the given peak density and widths.
double atoms_for_peak_density(double peak_density, const Vec3& sigma_pos);

} // namespace fiberguide
