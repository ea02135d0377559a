#include "fiberguide/ensemble.hpp"

#include <cmath>
#include <random>

#include "fiberguide/errors.hpp"

namespace fiberguide {

namespace {

constexpr double kGaussNorm = 15.749609945722419; // (2 pi)^{3/2}

} // namespace

void CloudConfig::validate() const
{
    if (!(n_atoms >= 0.0)) throw ParameterError("cloud.n_atoms must be >= 0");
    if (!(temperature >= 0.0)) throw ParameterError("cloud.temperature must be >= 0");
    if (!(sigma_pos.x >= 0.0 && sigma_pos.y >= 0.0 && sigma_pos.z >= 0.0)) {
        throw ParameterError("cloud.sigma_pos components must be >= 0");
    }
}

std::vector<AtomState> sample_cloud(const CloudConfig& cfg, const AtomSpecies& species,
                                    std::size_t count, std::uint64_t seed)
{
    cfg.validate();
    const double sigma_v = thermal_sigma_v(species, cfg.temperature);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<AtomState> atoms(count);
    for (auto& a : atoms) {
        // Draw all six numbers even for zero widths so the stream layout does
        // not depend on the configuration.
        const double gx = gauss(rng), gy = gauss(rng), gz = gauss(rng);
        const double ux = gauss(rng), uy = gauss(rng), uz = gauss(rng);
        a.position = cfg.center + Vec3{cfg.sigma_pos.x * gx, cfg.sigma_pos.y * gy, cfg.sigma_pos.z * gz};
        a.velocity = cfg.mean_velocity + sigma_v * Vec3{ux, uy, uz};
    }
    return atoms;
}

std::vector<AtomState> sample_cloud(const CloudConfig& cfg, const AtomSpecies& species,
                                    std::uint64_t seed)
{
    cfg.validate();
    return sample_cloud(cfg, species, static_cast<std::size_t>(std::llround(cfg.n_atoms)), seed);
}

double density_weight(const CloudConfig& cfg)
{
    const auto& s = cfg.sigma_pos;
    if (!(cfg.n_atoms > 0.0)) throw DomainError("cloud.n_atoms must be > 0 for a density");
    if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0)) {
        throw DomainError("cloud.sigma_pos must be > 0 on every axis for a density");
    }
    return cfg.n_atoms / (kGaussNorm * s.x * s.y * s.z);
}

double scale_factor(const CloudConfig& cfg, std::size_t simulated)
{
    if (simulated == 0) throw DomainError("scale factor needs at least one simulated atom");
    CloudConfig sim = cfg;
    sim.n_atoms = static_cast<double>(simulated);
    return density_weight(cfg) / density_weight(sim);
}

double atoms_for_peak_density(double peak_density, const Vec3& s)
{
    return peak_density * kGaussNorm * s.x * s.y * s.z;
}

} // namespace fiberguide
