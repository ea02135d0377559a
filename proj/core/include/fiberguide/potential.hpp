#pragma once

#include <optional>

#include "fiberguide/units.hpp"
#include "fiberguide/vec3.hpp"

namespace fiberguide {

/// Guiding beam inside the hollow core. The fiber occupies 0 <= z <= L along
/// the z axis; outside the facets the mode diverges as a free Gaussian beam.
struct GuideBeamConfig {
    double power = 2.3;                                                  // W
    double calib_depth_per_power = constants::boltzmann * 8.2e-3 / 2.3;  // J/W
    double wavelength = 1067e-9;                                         // m
    double mode_radius = 4.5e-6;                                         // m, w0
    double fiber_length = 0.088;                                         // m, L
    double core_radius = 6.0e-6;                                         // m
    int propagation_sign = +1;

    double depth() const noexcept { return calib_depth_per_power * power; }
    double rayleigh_range() const noexcept
    {
        return constants::pi * mode_radius * mode_radius / wavelength;
    }
    void validate() const;
};

/// Gaussian bump at the input facet standing in for reflection-induced
/// irregularities. Its height sets the guiding threshold.
struct FacetBarrierConfig {
    bool enabled = false;
    double height = constants::boltzmann * 2.1e-3; // J
    double axial_sigma = 10e-6;                    // m
    double position = 0.0;                         // m along z

    void validate() const;
};

/// Auxiliary free-space dipole trap near the input facet.
struct ReservoirBeamConfig {
    bool enabled = false;
    double depth = constants::boltzmann * 2.2e-3; // J
    double waist = 27e-6;                         // m
    double wavelength = 782e-9;                   // m
    Vec3 focus_position{};
    Vec3 axis{1.0, 0.0, 0.0};

    double rayleigh_range() const noexcept
    {
        return constants::pi * waist * waist / wavelength;
    }
    void validate() const;
};

struct FieldConfig {
    GuideBeamConfig guide;
    FacetBarrierConfig barrier;
    ReservoirBeamConfig reservoir;
    /// Unit vector pointing "up"; gravity is off when empty.
    std::optional<Vec3> gravity_axis;
    /// Mass entering the gravitational term m g (x . up).
    double gravity_mass = 84.9118 * constants::atomic_mass_unit;
    double gamma_sc_max = 120.0;                                    // Hz
    /// Equal to the default guide depth bit for bit.
    double gamma_sc_ref_depth = constants::boltzmann * 8.2e-3 / 2.3 * 2.3; // J

    void validate() const;
};

/// w(z): constant inside the fiber, free Gaussian divergence from the nearer
/// facet outside it.
double mode_radius_at(double z, const GuideBeamConfig& guide);

/// Linear power-to-depth calibration. Throws DomainError for power < 0.
double depth_from_power(double power, const GuideBeamConfig& guide);

/// Precomputed evaluator for the composite potential. Construct once per
/// FieldConfig; all member functions are const and thread-safe.
class Field {
public:
    struct Sample {
        double potential = 0.0;       // J, all terms
        Vec3 force{};                 // N
        double guide_potential = 0.0; // J, guide term only
    };

    explicit Field(FieldConfig config);

    const FieldConfig& config() const noexcept { return cfg_; }

    Sample sample(const Vec3& pos) const noexcept;
    double potential(const Vec3& pos) const noexcept;
    Vec3 force(const Vec3& pos) const noexcept;
    double guide_potential(const Vec3& pos) const noexcept;
    double scattering_rate(const Vec3& pos) const noexcept;
    double scattering_rate_from_guide(double guide_potential) const noexcept
    {
        // Ratio first so that the reference depth maps to gamma_sc_max exactly.
        return cfg_.gamma_sc_max * ((guide_potential < 0.0 ? -guide_potential : guide_potential) /
                                    cfg_.gamma_sc_ref_depth);
    }

    double depth() const noexcept { return depth_; }
    /// Radial angular frequency of the in-fiber well for a given mass.
    double radial_frequency(double mass) const noexcept;
    /// Unit vector of guide-light propagation.
    Vec3 propagation_direction() const noexcept
    {
        return {0.0, 0.0, cfg_.guide.propagation_sign >= 0 ? 1.0 : -1.0};
    }

private:
    void add_guide(const Vec3& pos, Sample& out) const noexcept;
    void add_barrier(const Vec3& pos, Sample& out) const noexcept;
    void add_reservoir(const Vec3& pos, Sample& out) const noexcept;

    FieldConfig cfg_;
    double depth_;
    double length_;
    double w0_sq_;
    double inv_zr_sq_;
    double barrier_inv_sigma_sq_;
    double res_waist_sq_;
    double res_inv_zr_sq_;
    Vec3 res_axis_;
};

double potential(const Vec3& pos, const FieldConfig& field);
Vec3 force(const Vec3& pos, const FieldConfig& field);
double scattering_rate(const Vec3& pos, const FieldConfig& field);

} // namespace fiberguide
