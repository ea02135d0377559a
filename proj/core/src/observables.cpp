#include "fiberguide/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiberguide/errors.hpp"

namespace fiberguide {

double FluxHistogram::peak_flux() const noexcept
{
    double best = 0.0;
    for (const auto& b : bins) best = std::max(best, b.flux);
    return best;
}

double FluxHistogram::peak_bin_start() const noexcept
{
    if (bins.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto it = std::max_element(bins.begin(), bins.end(),
                                     [](const FluxBin& a, const FluxBin& b) { return a.flux < b.flux; });
    return it->t_start;
}

double FluxHistogram::integrated_atoms() const noexcept
{
    double sum = 0.0;
    for (const auto& b : bins) sum += b.flux;
    return sum * bin_width;
}

double FluxHistogram::flux_at(double t) const noexcept
{
    if (t < 0.0) return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(t / bin_width));
    return k < bins.size() ? bins[k].flux : 0.0;
}

FluxHistogram flux_histogram(std::span<const TrajectoryOutcome> outcomes, double bin_width,
                             double scale, double horizon)
{
    if (!(bin_width > 0.0)) throw ParameterError("flux bin width must be > 0");

    std::vector<std::size_t> counts;
    if (horizon > 0.0) counts.resize(static_cast<std::size_t>(std::ceil(horizon / bin_width)), 0);
    std::size_t arrivals = 0;
    for (const auto& o : outcomes) {
        if (!o.transmitted()) continue;
        const auto k = static_cast<std::size_t>(std::floor(o.arrival_time / bin_width));
        if (k >= counts.size()) counts.resize(k + 1, 0);
        ++counts[k];
        ++arrivals;
    }

    FluxHistogram h;
    h.bin_width = bin_width;
    h.scale_factor = scale;
    h.arrivals = arrivals;
    h.bins.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        h.bins[k] = {static_cast<double>(k) * bin_width, scale * static_cast<double>(counts[k]) / bin_width};
    }
    return h;
}

FluxHistogram combine(const FluxHistogram& a, const FluxHistogram& b)
{
    if (a.bin_width != b.bin_width) throw ParameterError("cannot combine histograms with different bin widths");
    FluxHistogram out;
    out.bin_width = a.bin_width;
    out.arrivals = a.arrivals + b.arrivals;
    out.scale_factor = out.arrivals == 0
                           ? a.scale_factor
                           : (a.scale_factor * static_cast<double>(a.arrivals) +
                              b.scale_factor * static_cast<double>(b.arrivals)) /
                                 static_cast<double>(out.arrivals);
    const std::size_t n = std::max(a.bins.size(), b.bins.size());
    out.bins.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.bins[k].t_start = static_cast<double>(k) * out.bin_width;
        out.bins[k].flux = (k < a.bins.size() ? a.bins[k].flux : 0.0) +
                           (k < b.bins.size() ? b.bins[k].flux : 0.0);
    }
    return out;
}

std::size_t count_peaks(const FluxHistogram& h, double min_prominence)
{
    const double peak = h.peak_flux();
    if (peak <= 0.0) return 0;
    const std::size_t n = h.bins.size();
    std::size_t peaks = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = h.bins[k].flux;
        // Plateaus count once, at their left edge.
        if (k > 0 && h.bins[k - 1].flux >= v) continue;
        std::size_t right = k;
        while (right + 1 < n && h.bins[right + 1].flux == v) ++right;
        if (right + 1 < n && h.bins[right + 1].flux > v) continue;
        if (v <= 0.0) continue;

        // Prominence: height above the higher of the two lowest points
        // reached before climbing above v on either side.
        double left_min = v;
        bool left_higher = false;
        for (std::size_t j = k; j-- > 0;) {
            if (h.bins[j].flux > v) {
                left_higher = true;
                break;
            }
            left_min = std::min(left_min, h.bins[j].flux);
        }
        double right_min = v;
        bool right_higher = false;
        for (std::size_t j = right + 1; j < n; ++j) {
            if (h.bins[j].flux > v) {
                right_higher = true;
                break;
            }
            right_min = std::min(right_min, h.bins[j].flux);
        }
        // Beyond either end the histogram is implicitly zero.
        if (!left_higher) left_min = 0.0;
        if (!right_higher) right_min = 0.0;
        if (v - std::max(left_min, right_min) > min_prominence * peak) ++peaks;
    }
    return peaks;
}

double time_above_fraction(const FluxHistogram& h, double fraction)
{
    const double peak = h.peak_flux();
    if (h.bins.empty() || peak <= 0.0) return 0.0;
    std::size_t k = 0;
    while (h.bins[k].flux < peak) ++k;
    const double t_peak = h.bins[k].t_start;
    for (std::size_t j = k + 1; j < h.bins.size(); ++j) {
        if (h.bins[j].flux < fraction * peak) return h.bins[j].t_start - t_peak;
    }
    return static_cast<double>(h.bins.size()) * h.bin_width - t_peak;
}

std::optional<TransitStats> transit_stats(std::span<const TrajectoryOutcome> outcomes, double bin_width)
{
    std::vector<double> times;
    for (const auto& o : outcomes) {
        if (o.transmitted()) times.push_back(o.arrival_time);
    }
    if (times.empty()) return std::nullopt;

    TransitStats st;
    st.transmitted = times.size();
    st.transmitted_fraction = static_cast<double>(times.size()) / static_cast<double>(outcomes.size());
    double sum = 0.0;
    for (double t : times) sum += t;
    st.mean = sum / static_cast<double>(times.size());

    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    st.median = n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);

    const auto h = flux_histogram(outcomes, bin_width, 1.0);
    st.peak_time = h.peak_bin_start() + 0.5 * bin_width;
    return st;
}

double DensityProfile::bin_volume(std::size_t ir, std::size_t iz) const
{
    const double r0 = radial_edges[ir], r1 = radial_edges[ir + 1];
    return constants::pi * (r1 * r1 - r0 * r0) * (axial_edges[iz + 1] - axial_edges[iz]);
}

double DensityProfile::integrated_count() const
{
    double sum = 0.0;
    for (std::size_t ir = 0; ir < radial_bins(); ++ir) {
        for (std::size_t iz = 0; iz < axial_bins(); ++iz) sum += at(ir, iz) * bin_volume(ir, iz);
    }
    return sum;
}

namespace {

std::vector<double> edges(double extent, double width)
{
    const auto n = static_cast<std::size_t>(std::ceil(extent / width * (1.0 - 1e-12)));
    std::vector<double> e(n + 1);
    for (std::size_t k = 0; k <= n; ++k) e[k] = std::min(extent, static_cast<double>(k) * width);
    return e;
}

} // namespace

DensityProfile bin_density(std::span<const WeightedPosition> samples, const DensityGeometry& g)
{
    if (!(g.radial_bin > 0.0 && g.axial_bin > 0.0 && g.core_radius > 0.0 && g.fiber_length > 0.0)) {
        throw ParameterError("density geometry extents and bin widths must be > 0");
    }
    DensityProfile p;
    p.radial_edges = edges(g.core_radius, g.radial_bin);
    p.axial_edges = edges(g.fiber_length, g.axial_bin);
    const std::size_t nr = p.radial_bins(), nz = p.axial_bins();
    p.density.assign(nr * nz, 0.0);

    for (const auto& s : samples) {
        const double z = s.position.z;
        const double r = radial_distance(s.position);
        if (z < 0.0 || z > g.fiber_length || r >= g.core_radius) continue;
        const auto ir = std::min(nr - 1, static_cast<std::size_t>(r / g.radial_bin));
        const auto iz = std::min(nz - 1, static_cast<std::size_t>(z / g.axial_bin));
        p.density[ir * nz + iz] += s.weight;
    }
    for (std::size_t ir = 0; ir < nr; ++ir) {
        for (std::size_t iz = 0; iz < nz; ++iz) {
            double& d = p.density[ir * nz + iz];
            d /= p.bin_volume(ir, iz);
            p.peak_density = std::max(p.peak_density, d);
        }
    }
    return p;
}

DensityGeometry geometry_for(const GuideBeamConfig& guide)
{
    DensityGeometry g;
    g.core_radius = guide.core_radius;
    g.fiber_length = guide.fiber_length;
    return g;
}

DensityProfile density_profile(const Field& field, const AtomSpecies& species,
                               const IntegratorParams& params, double snapshot_time,
                               std::span<const AtomState> atoms, std::uint64_t seed, double scale,
                               unsigned workers)
{
    if (!(snapshot_time < params.t_max)) throw ParameterError("snapshot_time must be < t_max");
    const double times[] = {snapshot_time};
    const auto result = propagate_ensemble(atoms, field, species, params, seed,
                                           EnsembleOptions{workers, times});
    std::vector<WeightedPosition> samples;
    for (const auto& s : result.snapshots[0]) {
        if (s) samples.push_back({s->position, scale});
    }
    return bin_density(samples, geometry_for(field.config().guide));
}

double resonant_cross_section(double wavelength)
{
    return 3.0 * wavelength * wavelength / (2.0 * constants::pi);
}

double optical_depth(const DensityProfile& profile, double probe_wavelength)
{
    if (profile.radial_bins() == 0) return 0.0;
    double column = 0.0;
    for (std::size_t iz = 0; iz < profile.axial_bins(); ++iz) {
        column += profile.at(0, iz) * (profile.axial_edges[iz + 1] - profile.axial_edges[iz]);
    }
    return resonant_cross_section(probe_wavelength) * column;
}

double photon_signal(double n_atoms_in_view, Rng& rng, bool noisy, double photons_per_atom)
{
    const double mean = photons_per_atom * n_atoms_in_view;
    if (!noisy || mean <= 0.0) return mean;
    std::poisson_distribution<long long> poisson(mean);
    return static_cast<double>(poisson(rng));
}

} // namespace fiberguide
