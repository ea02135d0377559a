#pragma once

#include <string>
#include <string_view>

namespace fiberguide {

// CODATA exact values.
namespace constants {
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double planck = 6.62607015e-34;       // J s
inline constexpr double gravity_accel = 9.80665;       // m/s^2
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double pi = 3.14159265358979323846;
} // namespace constants

struct PhysicalConstants {
    double boltzmann = constants::boltzmann;
    double planck = constants::planck;
    double gravity_accel = constants::gravity_accel;
};

struct AtomSpecies {
    double mass = 0.0;              // kg
    double probe_wavelength = 0.0;  // m
    double natural_linewidth = 0.0; // Hz
    std::string label;

    void validate() const;
};

/// 85Rb with the D2 line as probe transition.
AtomSpecies rubidium85();

/// k_B * T. Throws DomainError for T < 0.
double energy_from_temperature(double kelvin);

/// Inverse of energy_from_temperature, for reporting depths in kelvin.
double temperature_from_energy(double joule);

/// Speed gained falling from rest through a potential drop of `depth`.
double capture_speed(double depth, const AtomSpecies& species);

/// Single-photon recoil speed h / (m lambda).
double recoil_speed(const AtomSpecies& species, double wavelength);

/// Per-axis Maxwell-Boltzmann velocity standard deviation.
double thermal_sigma_v(const AtomSpecies& species, double kelvin);

// --- quantities with explicit unit suffixes --------------------------------

enum class Dimension {
    Length,
    Time,
    Mass,
    Energy,      // J, or a temperature suffix converted via k_B
    Temperature, // K only
    Power,
    Frequency,
    Velocity,
    NumberDensity, // m^-3, cm^-3
    Dimensionless,
};

std::string_view dimension_name(Dimension d);

/// Parses "8.2 mK", "12 um", "2.3 W", "1067 nm" into SI. The unit suffix is
/// mandatory except for Dimensionless. Both "u" and the micro sign are
/// accepted as the micro prefix. Throws DomainError on malformed input or a
/// suffix of the wrong dimension.
double parse_quantity(std::string_view text, Dimension expected);

} // namespace fiberguide
