#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fiberguide/config.hpp"
#include "fiberguide/csv.hpp"
#include "fiberguide/errors.hpp"
#include "fiberguide/fit.hpp"
#include "fiberguide/report.hpp"
#include "fiberguide/scenario.hpp"

namespace fs = std::filesystem;
using namespace fiberguide;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out;
};

ScenarioConfig load(const Common& c)
{
    auto cfg = load_scenario_config(c.config);
    if (c.seed) cfg.master_seed = *c.seed;
    if (c.workers) cfg.workers = *c.workers;
    if (!c.out.empty()) cfg.output_dir = c.out;
    return cfg;
}

int run_simulate(const Common& c)
{
    const auto cfg = load(c);
    const auto result = run_scenario(cfg);
    write_report(cfg, result, cfg.output_dir);
    std::cout << scenario_summary(cfg, result);
    std::cout << "wrote " << cfg.output_dir.string() << "\n";
    return 0;
}

int run_sweep(const Common& c, const std::vector<double>& depths_mK)
{
    const auto cfg = load(c);
    std::vector<double> depths;
    for (double mK : depths_mK) depths.push_back(energy_from_temperature(mK * 1e-3));
    const auto table = sweep_depth(cfg, depths);
    write_report(table, cfg.output_dir);
    std::cout << sweep_summary(table, analyze_sweep(table));
    std::cout << "wrote " << (cfg.output_dir / "sweep.csv").string() << "\n";
    return 0;
}

int run_fit(const std::string& input, const std::string& model, std::string x_col, std::string y_col)
{
    const auto csv = read_csv(input);
    if (csv.header.size() < 2) throw IoError(input, "need at least two columns");
    if (x_col.empty()) x_col = csv.header[0];
    if (y_col.empty()) {
        if (csv.header.size() != 2) throw IoError(input, "more than two columns; choose one with --y");
        y_col = csv.header[1];
    }
    const auto cx = csv.column(x_col);
    const auto cy = csv.column(y_col);
    std::vector<DataPoint> points;
    for (const auto& row : csv.rows) {
        const double x = parse_number(row[cx]);
        const double y = parse_number(row[cy]);
        if (std::isfinite(x) && std::isfinite(y)) points.push_back({x, y});
    }
    const auto result = fit(points, fit_model_from_string(model));
    std::cout << "model " << to_string(result.model) << " on " << points.size() << " points (" << x_col << " -> "
              << y_col << ")\n";
    for (const auto& p : result.parameters) {
        std::printf("  %s = %.10g +/- %.4g\n", p.name.c_str(), p.value, p.sigma);
    }
    std::printf("  residual_norm = %.6g\n", result.residual_norm);
    return 0;
}

int run_report(const std::string& input, std::optional<double> barrier_mK)
{
    const fs::path dir(input);
    std::string text;
    if (fs::exists(dir / "sweep.csv")) {
        auto table = sweep_from_csv(read_csv(dir / "sweep.csv"));
        if (barrier_mK) table.barrier_height = energy_from_temperature(*barrier_mK * 1e-3);
        text = sweep_summary(table, analyze_sweep(table));
    } else if (fs::exists(dir / "flux.csv")) {
        FluxHistogram h;
        h.bins = flux_from_csv(read_csv(dir / "flux.csv"));
        if (h.bins.size() >= 2) h.bin_width = h.bins[1].t_start - h.bins[0].t_start;
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "flux\n  bins: %zu of %.4g ms\n  peak flux: %.4g atoms/s in bin starting %.4g ms\n"
                      "  integrated: %.4g atoms\n  above 10%% of peak for %.0f ms\n  prominent peaks: %zu\n",
                      h.bins.size(), h.bin_width * 1e3, h.peak_flux(), h.peak_bin_start() * 1e3,
                      h.integrated_atoms(), time_above_fraction(h, 0.1) * 1e3, count_peaks(h));
        text = buf;
    } else {
        throw IoError(dir.string(), "neither sweep.csv nor flux.csv found");
    }
    write_text_file(dir / "report.txt", text);
    std::cout << text;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo transport of cold atoms through a hollow-core fiber dipole guide"};
    app.require_subcommand(1);

    Common sim;
    auto* simulate = app.add_subcommand("simulate", "run one scenario and write CSV artifacts");
    simulate->add_option("--config", sim.config, "scenario YAML file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", sim.seed, "override the master seed");
    simulate->add_option("--out", sim.out, "output directory");
    simulate->add_option("--workers", sim.workers, "worker threads (0 = all cores)");

    Common sw;
    std::vector<double> depths;
    auto* sweep = app.add_subcommand("sweep", "run the scenario at several guide depths");
    sweep->add_option("--config", sw.config, "scenario YAML file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--depths", depths, "depths in mK, comma separated")->required()->delimiter(',');
    sweep->add_option("--seed", sw.seed, "override the master seed");
    sweep->add_option("--out", sw.out, "output directory");
    sweep->add_option("--workers", sw.workers, "worker threads (0 = all cores)");

    std::string fit_input, fit_model, fit_x, fit_y;
    auto* fitcmd = app.add_subcommand("fit", "fit a model to two CSV columns");
    fitcmd->add_option("--input", fit_input, "CSV file")->required()->check(CLI::ExistingFile);
    fitcmd->add_option("--model", fit_model, "power, sqrt-threshold or linear")
        ->required()
        ->check(CLI::IsMember({"power", "sqrt-threshold", "linear"}));
    fitcmd->add_option("--x", fit_x, "x column (default: first)");
    fitcmd->add_option("--y", fit_y, "y column (default: second of a two-column file)");

    std::string report_input;
    std::optional<double> barrier_mK;
    auto* report = app.add_subcommand("report", "summarise the CSV artifacts in a directory");
    report->add_option("--input", report_input, "output directory of simulate or sweep")
        ->required()
        ->check(CLI::ExistingDirectory);
    report->add_option("--barrier-height", barrier_mK, "barrier height in mK for the threshold check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return run_simulate(sim);
        if (*sweep) return run_sweep(sw, depths);
        if (*fitcmd) return run_fit(fit_input, fit_model, fit_x, fit_y);
        if (*report) return run_report(report_input, barrier_mK);
    } catch (const ConfigError& e) {
        std::cerr << "fiberguide: configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fiberguide: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
