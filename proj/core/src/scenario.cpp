#include "fiberguide/scenario.hpp"

#include <cmath>
#include <limits>

#include "fiberguide/errors.hpp"

namespace fiberguide {

namespace {

// Independent random streams derived from the master seed.
enum Stream : std::uint64_t {
    kMolassesSample = 0,
    kMolassesPropagate = 1,
    kReservoirSample = 2,
    kReservoirPropagate = 3,
    kPhotons = 4,
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    if (!(cfg.cloud.n_atoms > 0.0)) throw ConfigError("cloud.atoms", "must be > 0");
    if (cfg.reservoir_cloud && !(cfg.reservoir_cloud->n_atoms > 0.0)) {
        throw ConfigError("reservoir_cloud.atoms", "must be > 0");
    }

    const Field field(cfg.field);
    const auto snapshot_times = cfg.observables.density.times();
    const double snapshot_weight = 1.0 / static_cast<double>(snapshot_times.size());
    const double bin = cfg.observables.flux_bin;

    ScenarioResult res;
    std::vector<WeightedPosition> positions;

    const auto run_source = [&](const std::string& name, const CloudConfig& cloud, std::size_t n,
                                Stream sample_stream, Stream propagate_stream) {
        const auto atoms = sample_cloud(cloud, cfg.species, n, derive_seed(cfg.master_seed, sample_stream));
        const double scale = scale_factor(cloud, n);
        const auto ens = propagate_ensemble(atoms, field, cfg.species, cfg.integrator,
                                            derive_seed(cfg.master_seed, propagate_stream),
                                            {cfg.workers, snapshot_times});
        SourceResult src;
        src.name = name;
        src.first = res.outcomes.size();
        src.count = n;
        src.scale = scale;
        src.flux = flux_histogram(ens.outcomes, bin, scale, cfg.integrator.t_max);
        src.transit = transit_stats(ens.outcomes, bin);
        for (const auto& snap : ens.snapshots) {
            for (const auto& s : snap) {
                if (s) positions.push_back({s->position, scale * snapshot_weight});
            }
        }
        res.outcomes.insert(res.outcomes.end(), ens.outcomes.begin(), ens.outcomes.end());
        res.sources.push_back(std::move(src));
    };

    run_source("molasses", cfg.cloud, cfg.n_trajectories, kMolassesSample, kMolassesPropagate);
    if (cfg.reservoir_cloud) {
        const auto n = cfg.reservoir_trajectories ? cfg.reservoir_trajectories : cfg.n_trajectories;
        run_source("reservoir", *cfg.reservoir_cloud, n, kReservoirSample, kReservoirPropagate);
    }

    res.flux = res.sources.front().flux;
    for (std::size_t i = 1; i < res.sources.size(); ++i) res.flux = combine(res.flux, res.sources[i].flux);
    res.guided_count = res.flux.integrated_atoms();

    auto geometry = geometry_for(cfg.field.guide);
    geometry.radial_bin = cfg.observables.density.radial_bin;
    geometry.axial_bin = cfg.observables.density.axial_bin;
    res.density = bin_density(positions, geometry);
    res.optical_depth = optical_depth(res.density, cfg.species.probe_wavelength);

    Rng rng(derive_seed(cfg.master_seed, kPhotons));
    res.photons.reserve(res.flux.bins.size());
    for (const auto& b : res.flux.bins) {
        const double atoms = b.flux * res.flux.bin_width;
        res.photons.push_back({b.t_start, atoms,
                               photon_signal(atoms, rng, cfg.observables.photon_noise,
                                             cfg.observables.photons_per_atom)});
    }
    for (const auto& o : res.outcomes) {
        if (o.kind == OutcomeKind::Failed) ++res.failed;
    }
    return res;
}

ScenarioConfig with_depth(const ScenarioConfig& cfg, double depth)
{
    if (!(depth >= 0.0)) throw ParameterError("sweep depth must be >= 0");
    if (!(cfg.field.guide.calib_depth_per_power > 0.0)) {
        throw ParameterError("guide calibration must be > 0 to set a depth");
    }
    ScenarioConfig out = cfg;
    out.field.guide.power = depth / cfg.field.guide.calib_depth_per_power;
    return out;
}

SweepRow summarize(const ScenarioResult& result, double depth)
{
    SweepRow row;
    row.depth = depth;
    row.guided_count = result.guided_count;
    row.peak_flux = result.flux.peak_flux();
    row.mean_transit = result.primary().transit ? result.primary().transit->mean : kNaN;
    row.peak_density = result.density.peak_density;
    return row;
}

SweepTable sweep_depth(const ScenarioConfig& cfg, std::span<const double> depths)
{
    if (depths.empty()) throw ParameterError("sweep needs at least one depth");
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (!(depths[i] >= 0.0)) throw ParameterError("sweep depths must be >= 0");
        if (i > 0 && !(depths[i] > depths[i - 1])) {
            throw ParameterError("sweep depths must be strictly increasing");
        }
    }

    SweepTable table;
    if (cfg.field.barrier.enabled) table.barrier_height = cfg.field.barrier.height;
    for (const double depth : depths) {
        try {
            table.rows.push_back(summarize(run_scenario(with_depth(cfg, depth)), depth));
        } catch (const std::exception& e) {
            SweepRow row;
            row.depth = depth;
            row.guided_count = kNaN;
            row.peak_flux = kNaN;
            row.mean_transit = kNaN;
            row.peak_density = kNaN;
            row.error = e.what();
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

} // namespace fiberguide
