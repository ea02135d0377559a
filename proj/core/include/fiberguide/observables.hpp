#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fiberguide/dynamics.hpp"

namespace fiberguide {

/// Camera integration window used as the default flux bin.
inline constexpr double kDefaultFluxBin = 11e-3;
inline constexpr double kPhotonsPerAtom = 41.0;

struct FluxBin {
    double t_start = 0.0; // s
    double flux = 0.0;    // atoms/s
};

struct FluxHistogram {
    double bin_width = kDefaultFluxBin;
    std::vector<FluxBin> bins;
    /// Physical atoms per simulated arrival. After combine() this is the
    /// arrival-weighted mean of the inputs so that sum(flux) * bin_width ==
    /// scale_factor * arrivals still holds.
    double scale_factor = 1.0;
    std::size_t arrivals = 0;

    double peak_flux() const noexcept;
    /// Start of the bin holding the maximum; NaN if the histogram is empty.
    double peak_bin_start() const noexcept;
    double integrated_atoms() const noexcept;
    /// Flux of the bin containing t, zero outside the histogram.
    double flux_at(double t) const noexcept;
};

/// Bin k covers [k dt, (k+1) dt). `horizon` extends the histogram with
/// empty bins up to at least that time.
FluxHistogram flux_histogram(std::span<const TrajectoryOutcome> outcomes, double bin_width,
                             double scale, double horizon = 0.0);

/// Local maxima whose topographic prominence exceeds `min_prominence` times
/// the global peak. A histogram is single-peaked when this is 1.
std::size_t count_peaks(const FluxHistogram& h, double min_prominence = 0.5);

/// Time from the start of the peak bin to the start of the first later bin
/// whose flux drops below `fraction` of the peak; runs to the end of the
/// histogram if it never does. Zero for an empty histogram.
double time_above_fraction(const FluxHistogram& h, double fraction);

/// Bin-wise sum of two histograms with equal bin width.
FluxHistogram combine(const FluxHistogram& a, const FluxHistogram& b);

struct TransitStats {
    double mean = 0.0;
    double median = 0.0;
    double peak_time = 0.0; // centre of the fullest default-width bin
    double transmitted_fraction = 0.0;
    std::size_t transmitted = 0;
};

/// Statistics over Transmitted outcomes; nullopt when there are none.
std::optional<TransitStats> transit_stats(std::span<const TrajectoryOutcome> outcomes,
                                          double bin_width = kDefaultFluxBin);

struct DensityGeometry {
    double radial_bin = 0.25e-6; // m
    double axial_bin = 1e-3;     // m
    double core_radius = 6.0e-6; // m
    double fiber_length = 0.088; // m
};

struct DensityProfile {
    std::vector<double> radial_edges;
    std::vector<double> axial_edges;
    /// Row-major [radial][axial], atoms/m^3.
    std::vector<double> density;
    double peak_density = 0.0;

    std::size_t radial_bins() const noexcept { return radial_edges.empty() ? 0 : radial_edges.size() - 1; }
    std::size_t axial_bins() const noexcept { return axial_edges.empty() ? 0 : axial_edges.size() - 1; }
    double at(std::size_t ir, std::size_t iz) const { return density[ir * axial_bins() + iz]; }
    double bin_volume(std::size_t ir, std::size_t iz) const;
    /// Sum of density times bin volume.
    double integrated_count() const;
};

struct WeightedPosition {
    Vec3 position;
    double weight = 1.0;
};

/// Histograms positions with 0 <= z <= L and r < core into annular bins.
DensityProfile bin_density(std::span<const WeightedPosition> samples, const DensityGeometry& geometry);

/// Propagates `atoms` up to `snapshot_time` and bins the survivors inside the
/// fiber, each weighted by `scale`.
DensityProfile density_profile(const Field& field, const AtomSpecies& species,
                               const IntegratorParams& params, double snapshot_time,
                               std::span<const AtomState> atoms, std::uint64_t seed, double scale,
                               unsigned workers = 0);

DensityGeometry geometry_for(const GuideBeamConfig& guide);

/// Resonant cross section 3 lambda^2 / (2 pi).
double resonant_cross_section(double wavelength);

/// sigma_0 times the on-axis column density (innermost radial bin).
double optical_depth(const DensityProfile& profile, double probe_wavelength);

/// Detected photons for atoms in the detection volume; Poisson when noisy.
double photon_signal(double n_atoms_in_view, Rng& rng, bool noisy,
                     double photons_per_atom = kPhotonsPerAtom);

} // namespace fiberguide
