#include <doctest.h>

#include <cmath>
#include <vector>

#include "fiberguide/errors.hpp"
#include "fiberguide/observables.hpp"

using namespace fiberguide;

namespace {

constexpr double L = 0.088;

TrajectoryOutcome arrival(double t)
{
    TrajectoryOutcome o;
    o.kind = OutcomeKind::Transmitted;
    o.arrival_time = t;
    o.exit_velocity = {0, 0, 1.2};
    return o;
}

TrajectoryOutcome lost(OutcomeKind k = OutcomeKind::LostWall)
{
    TrajectoryOutcome o;
    o.kind = k;
    return o;
}

FluxHistogram histogram_of(std::vector<double> flux, double width = 1.0)
{
    FluxHistogram h;
    h.bin_width = width;
    for (std::size_t k = 0; k < flux.size(); ++k) h.bins.push_back({static_cast<double>(k) * width, flux[k]});
    return h;
}

// Area-uniform, axially stratified filling of a cylinder of radius R: each
// 1 mm slice holds an equal share and radii follow r = R sqrt(u) on a
// midpoint grid in u.
std::vector<WeightedPosition> uniform_cylinder(std::size_t n, double R)
{
    const std::size_t slices = 88;
    std::vector<WeightedPosition> out;
    for (std::size_t s = 0; s < slices; ++s) {
        const std::size_t in_slice = n / slices + (s < n % slices ? 1 : 0);
        for (std::size_t m = 0; m < in_slice; ++m) {
            const double u = (static_cast<double>(m) + 0.5) / static_cast<double>(in_slice);
            const double r = R * std::sqrt(u);
            const double phi = 2.399963229728653 * static_cast<double>(m); // golden angle
            const double z = (static_cast<double>(s) + (static_cast<double>(m) + 0.5) / static_cast<double>(in_slice)) * 1e-3;
            out.push_back({{r * std::cos(phi), r * std::sin(phi), z}, 1.0});
        }
    }
    return out;
}

DensityProfile uniform_profile(double n, std::size_t axial_bins)
{
    DensityProfile p;
    p.radial_edges = {0.0, 0.25e-6};
    for (std::size_t k = 0; k <= axial_bins; ++k) p.axial_edges.push_back(L * static_cast<double>(k) / static_cast<double>(axial_bins));
    p.density.assign(axial_bins, n);
    p.peak_density = n;
    return p;
}

} // namespace

TEST_CASE("flux histogram basics")
{
    SUBCASE("no arrivals")
    {
        const std::vector<TrajectoryOutcome> none{lost(), lost(OutcomeKind::TimedOut)};
        const auto h = flux_histogram(none, 11e-3, 1.0, 0.1);
        CHECK(h.bins.size() == 10);
        for (const auto& b : h.bins) CHECK(b.flux == 0.0);
        CHECK(h.peak_flux() == 0.0);
        CHECK(h.arrivals == 0);
    }
    SUBCASE("three arrivals in one bin")
    {
        const std::vector<TrajectoryOutcome> o{arrival(0.0561), arrival(0.0600), arrival(0.0659), lost()};
        const auto h = flux_histogram(o, 11e-3, 1.0);
        REQUIRE(h.bins.size() == 6);
        CHECK(h.bins[5].t_start == doctest::Approx(0.055));
        CHECK(h.bins[5].flux == doctest::Approx(272.7).epsilon(1e-3));
        CHECK(h.bins[5].flux == doctest::Approx(3 / 11e-3).epsilon(1e-14));
        CHECK(h.bins[4].flux == 0.0);
        CHECK(h.flux_at(0.06) == h.bins[5].flux);
        CHECK(h.flux_at(1.0) == 0.0);
        CHECK(h.flux_at(-1.0) == 0.0);
    }
    SUBCASE("translation by one bin")
    {
        const double w = 11e-3;
        std::vector<TrajectoryOutcome> a, b;
        for (double t : {0.0123, 0.0300, 0.0333, 0.0611, 0.0612, 0.0999}) {
            a.push_back(arrival(t));
            b.push_back(arrival(t + w));
        }
        const auto ha = flux_histogram(a, w, 2.5);
        const auto hb = flux_histogram(b, w, 2.5);
        REQUIRE(hb.bins.size() == ha.bins.size() + 1);
        CHECK(hb.bins[0].flux == 0.0);
        for (std::size_t k = 0; k < ha.bins.size(); ++k) CHECK(hb.bins[k + 1].flux == ha.bins[k].flux);
    }
    SUBCASE("mass conservation")
    {
        std::vector<TrajectoryOutcome> o;
        for (int i = 0; i < 500; ++i) o.push_back(i % 3 ? arrival(0.001 * i) : lost());
        const double scale = 123.4;
        const auto h = flux_histogram(o, 11e-3, scale, 0.2);
        double sum = 0.0;
        for (const auto& b : h.bins) {
            CHECK(b.flux >= 0.0);
            sum += b.flux;
        }
        CHECK(sum * h.bin_width / scale == doctest::Approx(333.0).epsilon(1e-12));
        CHECK(h.integrated_atoms() == doctest::Approx(333.0 * scale).epsilon(1e-12));
    }
    CHECK_THROWS_AS(flux_histogram({}, 0.0, 1.0), ParameterError);
}

TEST_CASE("combining histograms keeps the atom count")
{
    std::vector<TrajectoryOutcome> a{arrival(0.01), arrival(0.02)}, b{arrival(0.05)};
    const auto ha = flux_histogram(a, 11e-3, 10.0);
    const auto hb = flux_histogram(b, 11e-3, 40.0);
    const auto c = combine(ha, hb);
    CHECK(c.arrivals == 3);
    CHECK(c.bins.size() == hb.bins.size());
    CHECK(c.integrated_atoms() == doctest::Approx(60.0));
    CHECK(c.integrated_atoms() == doctest::Approx(c.scale_factor * 3));
    CHECK_THROWS_AS(combine(ha, flux_histogram(b, 10e-3, 1.0)), ParameterError);
}

TEST_CASE("peak counting")
{
    CHECK(count_peaks(histogram_of({})) == 0);
    CHECK(count_peaks(histogram_of({0, 0, 0})) == 0);
    CHECK(count_peaks(histogram_of({0, 1, 5, 9, 6, 3, 1, 0})) == 1);
    CHECK(count_peaks(histogram_of({9, 6, 3})) == 1);
    CHECK(count_peaks(histogram_of({0, 4, 4, 4, 0})) == 1);
    // Small wiggles on a tail are not separate peaks.
    CHECK(count_peaks(histogram_of({0, 10, 6, 7, 5, 5.5, 2})) == 1);
    CHECK(count_peaks(histogram_of({0, 10, 1, 9, 0})) == 2);
    CHECK(count_peaks(histogram_of({0, 10, 6, 9, 0})) == 1);
}

TEST_CASE("time above a fraction of the peak")
{
    const auto h = histogram_of({0, 2, 10, 8, 5, 1.5, 0.5, 0}, 0.01);
    CHECK(time_above_fraction(h, 0.1) == doctest::Approx(0.04));
    CHECK(time_above_fraction(h, 0.5) == doctest::Approx(0.03));
    CHECK(time_above_fraction(histogram_of({0, 10, 9, 9}, 0.01), 0.1) == doctest::Approx(0.03));
    CHECK(time_above_fraction(histogram_of({}), 0.1) == 0.0);
}

TEST_CASE("transit statistics")
{
    CHECK_FALSE(transit_stats(std::vector<TrajectoryOutcome>{lost(), lost()}).has_value());
    CHECK_FALSE(transit_stats(std::vector<TrajectoryOutcome>{}).has_value());

    const auto one = transit_stats(std::vector<TrajectoryOutcome>{arrival(0.060)});
    REQUIRE(one);
    CHECK(one->mean == doctest::Approx(0.060));
    CHECK(one->median == doctest::Approx(0.060));
    CHECK(one->peak_time == doctest::Approx(0.0605));

    const auto three = transit_stats(std::vector<TrajectoryOutcome>{arrival(0.040), arrival(0.060), lost(),
                                                                    arrival(0.080)});
    REQUIRE(three);
    CHECK(three->mean == doctest::Approx(0.060));
    CHECK(three->median == doctest::Approx(0.060));
    CHECK(three->transmitted == 3);
    CHECK(three->transmitted_fraction == doctest::Approx(0.75));

    const auto mode = transit_stats(std::vector<TrajectoryOutcome>{arrival(0.012), arrival(0.070), arrival(0.071),
                                                                   arrival(0.075), arrival(0.190)});
    REQUIRE(mode);
    CHECK(mode->peak_time == doctest::Approx(0.0715)); // centre of [66, 77) ms
    CHECK(mode->median == doctest::Approx(0.071));
}

TEST_CASE("density of a uniform cylinder")
{
    const double R = 1e-6;
    const auto samples = uniform_cylinder(10000, R);
    DensityGeometry g;
    const auto p = bin_density(samples, g);
    const double ref = 1e4 / (M_PI * R * R * L);
    CHECK(ref == doctest::Approx(3.62e16).epsilon(1e-3));
    CHECK(p.peak_density == doctest::Approx(ref).epsilon(0.05));
    CHECK(p.integrated_count() == doctest::Approx(1e4).epsilon(1e-2));
    CHECK(p.radial_bins() == 24);
    CHECK(p.axial_bins() == 88);

    double max = 0.0;
    for (double d : p.density) {
        CHECK(d >= 0.0);
        max = std::max(max, d);
    }
    CHECK(max == p.peak_density);
}

TEST_CASE("density binning ignores atoms outside the fiber")
{
    std::vector<WeightedPosition> s{{{0, 0, -1e-6}, 1.0}, {{0, 0, L + 1e-6}, 1.0}, {{7e-6, 0, 0.01}, 1.0}};
    const auto p = bin_density(s, DensityGeometry{});
    CHECK(p.peak_density == 0.0);
    CHECK(p.integrated_count() == 0.0);
    CHECK(optical_depth(p, 780e-9) == 0.0);

    DensityGeometry bad;
    bad.radial_bin = 0.0;
    CHECK_THROWS_AS(bin_density(s, bad), ParameterError);
}

TEST_CASE("density_profile with nobody inside")
{
    Field f{FieldConfig{}};
    IntegratorParams p;
    p.t_max = 2e-3;
    std::vector<AtomState> far(5);
    for (auto& a : far) a.position = {1e-3, 0, -2e-3};
    const auto prof = density_profile(f, rubidium85(), p, 1e-3, far, 1, 1.0, 1);
    CHECK(prof.peak_density == 0.0);
    CHECK_THROWS_AS(density_profile(f, rubidium85(), p, 2e-3, far, 1, 1.0, 1), ParameterError);
}

TEST_CASE("optical depth")
{
    const double sigma0 = 3 * 780e-9 * 780e-9 / (2 * M_PI);
    CHECK(sigma0 * 1e4 == doctest::Approx(2.905e-9).epsilon(1e-3)); // cm^2
    CHECK(resonant_cross_section(780e-9) == doctest::Approx(sigma0).epsilon(1e-14));

    const auto p = uniform_profile(5e17, 88);
    CHECK(optical_depth(p, 780e-9) == doctest::Approx(1.28e4).epsilon(1e-2));
    CHECK(optical_depth(p, 780e-9) == doctest::Approx(sigma0 * 5e17 * L).epsilon(1e-12));
    CHECK(optical_depth(uniform_profile(1e18, 88), 780e-9) ==
          doctest::Approx(2 * optical_depth(p, 780e-9)).epsilon(1e-14));
    CHECK(optical_depth(uniform_profile(0.0, 88), 780e-9) == 0.0);
    CHECK(optical_depth(DensityProfile{}, 780e-9) == 0.0);
}

TEST_CASE("optical depth is stable under axial refinement")
{
    // Smooth axial profile, a broad Gaussian, sampled on a fine grid of
    // atoms and binned at 50 and 500 axial bins.
    std::vector<WeightedPosition> s;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = L * (i + 0.5) / n;
        const double w = std::exp(-std::pow((z - 0.03) / 0.02, 2));
        s.push_back({{0.1e-6, 0, z}, w});
    }
    DensityGeometry coarse, fine;
    coarse.axial_bin = L / 50;
    fine.axial_bin = L / 500;
    const double a = optical_depth(bin_density(s, coarse), 780e-9);
    const double b = optical_depth(bin_density(s, fine), 780e-9);
    CHECK(a > 0.0);
    CHECK(b == doctest::Approx(a).epsilon(0.02));
}

TEST_CASE("photon signal")
{
    Rng rng(31);
    CHECK(photon_signal(0, rng, true) == 0.0);
    CHECK(photon_signal(0, rng, false) == 0.0);
    CHECK(photon_signal(100, rng, false) == 4100.0);
    CHECK(photon_signal(100, rng, false, 30.0) == 3000.0);

    const int trials = 1000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double x = photon_signal(100, rng, true);
        CHECK(x == std::floor(x));
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / trials;
    CHECK(std::abs(mean - 4100.0) < 3 * std::sqrt(4100.0 / trials));
    const double var = sum2 / trials - mean * mean;
    CHECK(var == doctest::Approx(4100.0).epsilon(0.2));
}
