#include "fiberguide/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fiberguide/errors.hpp"

namespace fiberguide {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double to_mK(double joule)
{
    return temperature_from_energy(joule) * 1e3;
}

std::string verdict(bool pass)
{
    return pass ? "PASS" : "FAIL";
}

} // namespace

CsvTable flux_csv(const FluxHistogram& h)
{
    CsvTable t;
    t.header = {"t_start_s", "flux_atoms_per_s"};
    for (const auto& b : h.bins) t.rows.push_back({format_number(b.t_start), format_number(b.flux)});
    return t;
}

CsvTable outcomes_csv(std::span<const TrajectoryOutcome> outcomes)
{
    CsvTable t;
    t.header = {"index", "kind", "arrival_time_s", "exit_vz_m_per_s", "scatter_count"};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const bool tr = o.transmitted();
        t.rows.push_back({format_count(i), std::string(to_string(o.kind)),
                          tr ? format_number(o.arrival_time) : std::string{},
                          tr ? format_number(o.exit_velocity.z) : std::string{},
                          format_count(o.scatter_count)});
    }
    return t;
}

CsvTable density_csv(const DensityProfile& p)
{
    CsvTable t;
    t.header = {"r_m", "z_m", "density_per_m3"};
    for (std::size_t ir = 0; ir < p.radial_bins(); ++ir) {
        const double r = 0.5 * (p.radial_edges[ir] + p.radial_edges[ir + 1]);
        for (std::size_t iz = 0; iz < p.axial_bins(); ++iz) {
            const double z = 0.5 * (p.axial_edges[iz] + p.axial_edges[iz + 1]);
            t.rows.push_back({format_number(r), format_number(z), format_number(p.at(ir, iz))});
        }
    }
    return t;
}

CsvTable photons_csv(std::span<const PhotonBin> photons)
{
    CsvTable t;
    t.header = {"t_start_s", "atoms", "photons"};
    for (const auto& p : photons) {
        t.rows.push_back({format_number(p.t_start), format_number(p.atoms), format_number(p.photons)});
    }
    return t;
}

CsvTable sweep_csv(const SweepTable& table)
{
    CsvTable t;
    t.header = {"depth_J", "guided_count", "peak_flux_atoms_per_s", "mean_transit_s", "peak_density_per_m3"};
    for (const auto& r : table.rows) {
        t.rows.push_back({format_number(r.depth), format_number(r.guided_count), format_number(r.peak_flux),
                          format_number(r.mean_transit), format_number(r.peak_density)});
    }
    return t;
}

SweepTable sweep_from_csv(const CsvTable& csv)
{
    const auto c_depth = csv.column("depth_J");
    const auto c_guided = csv.column("guided_count");
    const auto c_flux = csv.column("peak_flux_atoms_per_s");
    const auto c_transit = csv.column("mean_transit_s");
    const auto c_density = csv.column("peak_density_per_m3");
    SweepTable table;
    for (const auto& row : csv.rows) {
        SweepRow r;
        r.depth = parse_number(row[c_depth]);
        r.guided_count = parse_number(row[c_guided]);
        r.peak_flux = parse_number(row[c_flux]);
        r.mean_transit = parse_number(row[c_transit]);
        r.peak_density = parse_number(row[c_density]);
        table.rows.push_back(r);
    }
    return table;
}

std::vector<FluxBin> flux_from_csv(const CsvTable& csv)
{
    const auto c_t = csv.column("t_start_s");
    const auto c_f = csv.column("flux_atoms_per_s");
    std::vector<FluxBin> bins;
    for (const auto& row : csv.rows) bins.push_back({parse_number(row[c_t]), parse_number(row[c_f])});
    return bins;
}

namespace {

// Rows usable for a fit of column `y`: finite values, optionally positive.
std::vector<DataPoint> points_of(const SweepTable& table, double SweepRow::*y, bool positive,
                                 const char* label, std::vector<std::string>& notes)
{
    std::vector<DataPoint> pts;
    for (const auto& r : table.rows) {
        const double v = r.*y;
        if (!r.ok() || !std::isfinite(v) || !std::isfinite(r.depth) || !(r.depth > 0.0) ||
            (positive && !(v > 0.0))) {
            notes.push_back(fmt::format("{}: row at {:.4g} mK left out of the fit", label, to_mK(r.depth)));
            continue;
        }
        pts.push_back({to_mK(r.depth), v});
    }
    return pts;
}

template <typename F>
std::optional<FitResult> try_fit(F&& f, const char* label, std::vector<std::string>& notes)
{
    try {
        return f();
    } catch (const FitError& e) {
        notes.push_back(fmt::format("{} fit failed: {}", label, e.what()));
        return std::nullopt;
    }
}

} // namespace

SweepAnalysis analyze_sweep(const SweepTable& table)
{
    SweepAnalysis a;
    const bool barrier = std::isfinite(table.barrier_height);

    const auto transit = points_of(table, &SweepRow::mean_transit, true, "mean_transit", a.notes);
    const auto flux = points_of(table, &SweepRow::peak_flux, true, "peak_flux", a.notes);
    std::vector<std::string> scratch;
    const auto flux_all = points_of(table, &SweepRow::peak_flux, false, "peak_flux", scratch);
    const auto guided = points_of(table, &SweepRow::guided_count, false, "guided_count", a.notes);

    a.transit_fit = try_fit([&] { return fit_power_law(transit); }, "transit power-law", a.notes);
    a.flux_fit = try_fit([&] { return fit_power_law(flux); }, "flux power-law", a.notes);
    a.threshold_fit = try_fit([&] { return fit_sqrt_threshold(flux_all); }, "flux threshold", a.notes);
    a.guided_fit = try_fit([&] { return fit_linear(guided); }, "guided linear", a.notes);
    a.guided_constant_norm = constant_residual_norm(guided);

    if (!barrier) {
        if (a.transit_fit) {
            const double p = a.transit_fit->value("p");
            a.checks.push_back({"transit-time exponent -0.50 +/- 0.05", std::abs(p + 0.5) <= 0.05,
                                fmt::format("p = {:.4f} +/- {:.4f}", p, a.transit_fit->sigma("p"))});
        }
        if (a.flux_fit) {
            const double p = a.flux_fit->value("p");
            a.checks.push_back({"peak-flux exponent +0.5 +/- 0.1", std::abs(p - 0.5) <= 0.1,
                                fmt::format("p = {:.4f} +/- {:.4f}", p, a.flux_fit->sigma("p"))});
        }
        bool decreasing = transit.size() >= 2;
        for (std::size_t i = 1; i < transit.size(); ++i) decreasing = decreasing && transit[i].y < transit[i - 1].y;
        a.checks.push_back({"mean transit strictly decreasing with depth", decreasing,
                            fmt::format("{} rows", transit.size())});
    } else if (a.threshold_fit) {
        const double x0 = a.threshold_fit->value("x0");
        const double h = to_mK(table.barrier_height);
        a.checks.push_back({"flux threshold within 20% of barrier height", std::abs(x0 - h) <= 0.2 * h,
                            fmt::format("x0 = {:.4f} +/- {:.4f} mK, barrier {:.4g} mK", x0,
                                        a.threshold_fit->sigma("x0"), h)});
    }

    bool monotone = guided.size() >= 2;
    for (std::size_t i = 1; i < guided.size(); ++i) monotone = monotone && guided[i].y > guided[i - 1].y;
    a.checks.push_back({"guided count monotone increasing", monotone, fmt::format("{} rows", guided.size())});
    if (a.guided_fit) {
        const double lin = a.guided_fit->residual_norm;
        const double ratio = lin > 0.0 ? a.guided_constant_norm / lin : std::numeric_limits<double>::infinity();
        a.checks.push_back({"linear fit beats constant by >= 5x", ratio >= 5.0,
                            fmt::format("residual ratio {:.3g}", ratio)});
    }

    std::optional<std::size_t> best;
    std::size_t n_density = 0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        if (!r.ok() || !std::isfinite(r.peak_density)) continue;
        ++n_density;
        if (!best || r.peak_density > table.rows[*best].peak_density) best = i;
    }
    if (best && n_density >= 3) {
        const bool interior = *best != 0 && *best + 1 != table.rows.size();
        a.checks.push_back({"peak density maximal at an interior depth", interior,
                            fmt::format("maximum at {:.4g} mK", to_mK(table.rows[*best].depth))});
    }
    return a;
}

std::vector<Check> scenario_checks(const ScenarioConfig&, const ScenarioResult& result)
{
    std::vector<Check> checks;
    const auto& primary = result.primary();
    const double fraction = primary.transit ? primary.transit->transmitted_fraction : 0.0;
    checks.push_back({"nonzero transmitted fraction", fraction > 0.0, fmt::format("{:.4g}", fraction)});
    const auto peaks = count_peaks(primary.flux);
    checks.push_back({"molasses flux single-peaked", peaks == 1, fmt::format("{} prominent peaks", peaks)});
    checks.push_back({"no failed trajectories", result.failed == 0, fmt::format("{} failed", result.failed)});
    return checks;
}

namespace {

void append_checks(std::string& out, const std::vector<Check>& checks)
{
    out += "checks\n";
    for (const auto& c : checks) out += fmt::format("  [{}] {}: {}\n", verdict(c.pass), c.name, c.detail);
}

void append_fit(std::string& out, const char* label, const std::optional<FitResult>& f)
{
    if (!f) return;
    out += fmt::format("  {} ({}):", label, to_string(f->model));
    for (const auto& p : f->parameters) out += fmt::format(" {} = {:.6g} +/- {:.3g};", p.name, p.value, p.sigma);
    out += fmt::format(" residual norm {:.4g}\n", f->residual_norm);
}

} // namespace

std::string sweep_summary(const SweepTable& table, const SweepAnalysis& a)
{
    std::string out = "depth sweep\n";
    if (std::isfinite(table.barrier_height)) {
        out += fmt::format("  barrier height: {:.4g} mK\n", to_mK(table.barrier_height));
    } else {
        out += "  barrier: off\n";
    }
    out += "  depth_mK  guided_count  peak_flux_per_s  mean_transit_ms  peak_density_per_cm3\n";
    for (const auto& r : table.rows) {
        if (!r.ok()) {
            out += fmt::format("  {:8.4g}  error: {}\n", to_mK(r.depth), r.error);
            continue;
        }
        out += fmt::format("  {:8.4g}  {:12.5g}  {:15.5g}  {:15.5g}  {:20.5g}\n", to_mK(r.depth), r.guided_count,
                           r.peak_flux, r.mean_transit * 1e3, r.peak_density * 1e-6);
    }
    out += "fits (x = depth in mK)\n";
    append_fit(out, "mean transit", a.transit_fit);
    append_fit(out, "peak flux", a.flux_fit);
    append_fit(out, "peak flux threshold", a.threshold_fit);
    append_fit(out, "guided count", a.guided_fit);
    out += fmt::format("  guided count constant-model residual norm {:.4g}\n", a.guided_constant_norm);
    for (const auto& n : a.notes) out += "  note: " + n + "\n";
    append_checks(out, a.checks);
    return out;
}

std::string scenario_summary(const ScenarioConfig& cfg, const ScenarioResult& r)
{
    std::string out = "scenario\n";
    out += fmt::format("  guide depth: {:.4g} mK, barrier {}, reservoir beam {}, gravity {}\n",
                       to_mK(cfg.field.guide.depth()), cfg.field.barrier.enabled ? "on" : "off",
                       cfg.field.reservoir.enabled ? "on" : "off", cfg.field.gravity_axis ? "on" : "off");
    out += fmt::format("  master seed: {}\n", cfg.master_seed);
    for (const auto& s : r.sources) {
        std::size_t kinds[5] = {};
        for (std::size_t i = s.first; i < s.first + s.count; ++i) ++kinds[static_cast<int>(r.outcomes[i].kind)];
        out += fmt::format("  {}: {} trajectories, {:.4g} atoms each\n", s.name, s.count, s.scale);
        out += fmt::format("    Transmitted {}, LostWall {}, LostBack {}, TimedOut {}, Failed {}\n", kinds[0],
                           kinds[1], kinds[2], kinds[3], kinds[4]);
        if (s.transit) {
            out += fmt::format("    transit: mean {:.2f} ms, median {:.2f} ms, peak {:.2f} ms, fraction {:.4g}\n",
                               s.transit->mean * 1e3, s.transit->median * 1e3, s.transit->peak_time * 1e3,
                               s.transit->transmitted_fraction);
        } else {
            out += "    transit: nothing transmitted\n";
        }
        out += fmt::format("    peak flux {:.4g} atoms/s, above 10% of peak for {:.0f} ms\n", s.flux.peak_flux(),
                           time_above_fraction(s.flux, 0.1) * 1e3);
    }
    out += fmt::format("  combined: guided atoms {:.4g}, peak flux {:.4g} atoms/s, above 10% of peak for {:.0f} ms\n",
                       r.guided_count, r.flux.peak_flux(), time_above_fraction(r.flux, 0.1) * 1e3);
    const auto& w = cfg.observables.density;
    out += fmt::format("  density window {:.1f}-{:.1f} ms ({} snapshots): peak {:.4g} cm^-3, optical depth {:.4g}\n",
                       w.start * 1e3, w.stop * 1e3, w.snapshots, r.density.peak_density * 1e-6, r.optical_depth);
    double photons = 0.0;
    for (const auto& p : r.photons) photons += p.photons;
    out += fmt::format("  detected photons: {:.6g}\n", photons);
    append_checks(out, scenario_checks(cfg, r));
    return out;
}

namespace {

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
}

} // namespace

void write_report(const ScenarioConfig& cfg, const ScenarioResult& result, const std::filesystem::path& dir)
{
    ensure_dir(dir);
    write_csv(dir / "flux.csv", flux_csv(result.flux));
    write_csv(dir / "outcomes.csv", outcomes_csv(result.outcomes));
    write_csv(dir / "density.csv", density_csv(result.density));
    write_csv(dir / "photons.csv", photons_csv(result.photons));
    write_text_file(dir / "summary.txt", scenario_summary(cfg, result));
}

void write_report(const SweepTable& table, const std::filesystem::path& dir)
{
    ensure_dir(dir);
    write_csv(dir / "sweep.csv", sweep_csv(table));
    write_text_file(dir / "summary.txt", sweep_summary(table, analyze_sweep(table)));
}

} // namespace fiberguide
