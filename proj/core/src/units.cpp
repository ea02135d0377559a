#include "fiberguide/units.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "fiberguide/errors.hpp"

namespace fiberguide {

void AtomSpecies::validate() const
{
    if (!(mass > 0.0)) throw ParameterError("species.mass must be > 0");
    if (!(probe_wavelength > 0.0)) throw ParameterError("species.probe_wavelength must be > 0");
    if (natural_linewidth < 0.0) throw ParameterError("species.natural_linewidth must be >= 0");
}

AtomSpecies rubidium85()
{
    return AtomSpecies{
        .mass = 84.9118 * constants::atomic_mass_unit,
        .probe_wavelength = 780.241e-9,
        .natural_linewidth = 6.0666e6,
        .label = "Rb85",
    };
}

double energy_from_temperature(double kelvin)
{
    if (!(kelvin >= 0.0)) throw DomainError("temperature must be >= 0 K");
    return constants::boltzmann * kelvin;
}

double temperature_from_energy(double joule)
{
    return joule / constants::boltzmann;
}

double capture_speed(double depth, const AtomSpecies& species)
{
    if (!(depth >= 0.0)) throw DomainError("potential depth must be >= 0 J");
    return std::sqrt(2.0 * depth / species.mass);
}

double recoil_speed(const AtomSpecies& species, double wavelength)
{
    if (!(wavelength > 0.0)) throw DomainError("wavelength must be > 0 m");
    return constants::planck / (species.mass * wavelength);
}

double thermal_sigma_v(const AtomSpecies& species, double kelvin)
{
    if (!(kelvin >= 0.0)) throw DomainError("temperature must be >= 0 K");
    return std::sqrt(constants::boltzmann * kelvin / species.mass);
}

std::string_view dimension_name(Dimension d)
{
    switch (d) {
    case Dimension::Length: return "length";
    case Dimension::Time: return "time";
    case Dimension::Mass: return "mass";
    case Dimension::Energy: return "energy";
    case Dimension::Temperature: return "temperature";
    case Dimension::Power: return "power";
    case Dimension::Frequency: return "frequency";
    case Dimension::Velocity: return "velocity";
    case Dimension::NumberDensity: return "number density";
    case Dimension::Dimensionless: return "dimensionless";
    }
    return "?";
}

namespace {

struct UnitEntry {
    std::string_view suffix;
    Dimension dim;
    double factor;
};

constexpr double kB = constants::boltzmann;

// Micro is listed twice: ASCII "u" and UTF-8 "µ" / "μ".
constexpr std::array kUnits = {
    UnitEntry{"m", Dimension::Length, 1.0},
    UnitEntry{"cm", Dimension::Length, 1e-2},
    UnitEntry{"mm", Dimension::Length, 1e-3},
    UnitEntry{"um", Dimension::Length, 1e-6},
    UnitEntry{"µm", Dimension::Length, 1e-6},
    UnitEntry{"μm", Dimension::Length, 1e-6},
    UnitEntry{"nm", Dimension::Length, 1e-9},
    UnitEntry{"s", Dimension::Time, 1.0},
    UnitEntry{"ms", Dimension::Time, 1e-3},
    UnitEntry{"us", Dimension::Time, 1e-6},
    UnitEntry{"µs", Dimension::Time, 1e-6},
    UnitEntry{"μs", Dimension::Time, 1e-6},
    UnitEntry{"ns", Dimension::Time, 1e-9},
    UnitEntry{"kg", Dimension::Mass, 1.0},
    UnitEntry{"u", Dimension::Mass, constants::atomic_mass_unit},
    UnitEntry{"J", Dimension::Energy, 1.0},
    UnitEntry{"K", Dimension::Temperature, 1.0},
    UnitEntry{"mK", Dimension::Temperature, 1e-3},
    UnitEntry{"uK", Dimension::Temperature, 1e-6},
    UnitEntry{"µK", Dimension::Temperature, 1e-6},
    UnitEntry{"μK", Dimension::Temperature, 1e-6},
    UnitEntry{"nK", Dimension::Temperature, 1e-9},
    UnitEntry{"W", Dimension::Power, 1.0},
    UnitEntry{"mW", Dimension::Power, 1e-3},
    UnitEntry{"Hz", Dimension::Frequency, 1.0},
    UnitEntry{"kHz", Dimension::Frequency, 1e3},
    UnitEntry{"MHz", Dimension::Frequency, 1e6},
    UnitEntry{"m/s", Dimension::Velocity, 1.0},
    UnitEntry{"cm/s", Dimension::Velocity, 1e-2},
    UnitEntry{"mm/s", Dimension::Velocity, 1e-3},
    UnitEntry{"m^-3", Dimension::NumberDensity, 1.0},
    UnitEntry{"cm^-3", Dimension::NumberDensity, 1e6},
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

} // namespace

double parse_quantity(std::string_view text, Dimension expected)
{
    const std::string_view s = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || !std::isfinite(value)) {
        throw DomainError("cannot parse a number from '" + std::string(text) + "'");
    }
    const std::string_view suffix = trim(std::string_view(end, s.data() + s.size() - end));

    if (suffix.empty()) {
        if (expected == Dimension::Dimensionless) return value;
        throw DomainError("missing unit suffix in '" + std::string(text) + "' (expected " +
                          std::string(dimension_name(expected)) + ")");
    }
    for (const auto& u : kUnits) {
        if (u.suffix != suffix) continue;
        if (u.dim == expected) return value * u.factor;
        if (expected == Dimension::Energy && u.dim == Dimension::Temperature) {
            return value * u.factor * kB;
        }
        break;
    }
    throw DomainError("unit '" + std::string(suffix) + "' in '" + std::string(text) +
                      "' is not a valid " + std::string(dimension_name(expected)) + " unit");
}

} // namespace fiberguide
