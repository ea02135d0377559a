#include "fiberguide/config.hpp"

#include <cmath>
#include <functional>

#include <yaml-cpp/yaml.h>

#include "fiberguide/csv.hpp"
#include "fiberguide/errors.hpp"

namespace fiberguide {

std::vector<double> DensityWindow::times() const
{
    std::vector<double> out;
    if (snapshots == 0) return out;
    out.reserve(snapshots);
    if (snapshots == 1) {
        out.push_back(start);
        return out;
    }
    const double step = (stop - start) / static_cast<double>(snapshots - 1);
    for (std::size_t i = 0; i < snapshots; ++i) out.push_back(start + step * static_cast<double>(i));
    return out;
}

void DensityWindow::validate(double t_max) const
{
    if (snapshots == 0) throw ConfigError("observables.density.snapshots", "must be > 0");
    if (!(start >= 0.0)) throw ConfigError("observables.density.start", "must be >= 0");
    if (!(stop >= start)) throw ConfigError("observables.density.stop", "must be >= start");
    if (!(stop < t_max)) throw ConfigError("observables.density.stop", "must be < integrator.t_max");
    if (!(radial_bin > 0.0)) throw ConfigError("observables.density.radial_bin", "must be > 0");
    if (!(axial_bin > 0.0)) throw ConfigError("observables.density.axial_bin", "must be > 0");
}

CloudConfig default_molasses_cloud()
{
    CloudConfig c;
    c.n_atoms = atoms_for_peak_density(kMolassesPeakDensity, c.sigma_pos);
    return c;
}

namespace {

template <typename F>
void rethrow_as_config_error(const std::string& field, F&& f)
{
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(field, e.what());
    }
}

} // namespace

void ScenarioConfig::validate() const
{
    if (n_trajectories == 0) throw ConfigError("trajectories", "must be > 0");
    rethrow_as_config_error("species", [&] { species.validate(); });
    rethrow_as_config_error("field", [&] { field.validate(); });
    rethrow_as_config_error("cloud", [&] { cloud.validate(); });
    if (reservoir_cloud) rethrow_as_config_error("reservoir_cloud", [&] { reservoir_cloud->validate(); });
    rethrow_as_config_error("integrator", [&] {
        integrator.check_stability(Field(field), species);
    });
    if (!(observables.flux_bin > 0.0)) throw ConfigError("observables.flux_bin", "must be > 0");
    if (!(observables.photons_per_atom >= 0.0)) {
        throw ConfigError("observables.photons_per_atom", "must be >= 0");
    }
    observables.density.validate(integrator.t_max);
}

namespace {

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string scalar(const YAML::Node& node, const std::string& path)
{
    if (!node.IsScalar()) throw ConfigError(path, "expected a scalar value");
    return node.Scalar();
}

double quantity(const YAML::Node& node, const std::string& path, Dimension dim)
{
    const auto text = scalar(node, path);
    try {
        return parse_quantity(text, dim);
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

std::uint64_t count(const YAML::Node& node, const std::string& path)
{
    const double v = quantity(node, path, Dimension::Dimensionless);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
        throw ConfigError(path, "expected a non-negative integer, got '" + node.Scalar() + "'");
    }
    return static_cast<std::uint64_t>(v);
}

bool boolean(const YAML::Node& node, const std::string& path)
{
    const auto text = scalar(node, path);
    if (text == "true" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "off" || text == "no") return false;
    throw ConfigError(path, "expected true/false, got '" + text + "'");
}

Vec3 vector3(const YAML::Node& node, const std::string& path, Dimension dim, bool allow_scalar = false)
{
    if (allow_scalar && node.IsScalar()) {
        const double v = quantity(node, path, dim);
        return {v, v, v};
    }
    if (!node.IsSequence() || node.size() != 3) throw ConfigError(path, "expected a list of three values");
    return {quantity(node[0], path + "[0]", dim), quantity(node[1], path + "[1]", dim),
            quantity(node[2], path + "[2]", dim)};
}

Vec3 direction(const YAML::Node& node, const std::string& path)
{
    const Vec3 v = vector3(node, path, Dimension::Dimensionless);
    if (!(norm(v) > 0.0)) throw ConfigError(path, "direction must be nonzero");
    return normalized(v);
}

// Visits the keys of a mapping, failing on any key without a handler.
class Section {
public:
    using Handler = std::function<void(const YAML::Node&, const std::string&)>;

    Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (node_ && !node_.IsNull() && !node_.IsMap()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping");
        }
    }

    Section& on(const std::string& key, Handler h)
    {
        handlers_.emplace_back(key, std::move(h));
        return *this;
    }

    void run()
    {
        if (!node_ || node_.IsNull()) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            bool found = false;
            for (const auto& [k, h] : handlers_) {
                if (k != key) continue;
                h(kv.second, join(path_, key));
                found = true;
                break;
            }
            if (!found) throw ConfigError(join(path_, key), "unknown key");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::vector<std::pair<std::string, Handler>> handlers_;
};

AtomSpecies parse_species(const YAML::Node& node, const std::string& path)
{
    if (node.IsScalar()) {
        const auto name = node.Scalar();
        if (name == "Rb85" || name == "rb85" || name == "85Rb") return rubidium85();
        throw ConfigError(path, "unknown species '" + name + "' (known: Rb85)");
    }
    AtomSpecies s = rubidium85();
    Section(node, path)
        .on("mass", [&](auto& n, auto& p) { s.mass = quantity(n, p, Dimension::Mass); })
        .on("probe_wavelength", [&](auto& n, auto& p) { s.probe_wavelength = quantity(n, p, Dimension::Length); })
        .on("linewidth", [&](auto& n, auto& p) { s.natural_linewidth = quantity(n, p, Dimension::Frequency); })
        .on("label", [&](auto& n, auto& p) { s.label = scalar(n, p); })
        .run();
    return s;
}

void parse_guide(const YAML::Node& node, const std::string& path, GuideBeamConfig& g)
{
    std::optional<double> depth;
    std::optional<double> power;
    Section(node, path)
        .on("depth", [&](auto& n, auto& p) { depth = quantity(n, p, Dimension::Energy); })
        .on("power", [&](auto& n, auto& p) { power = quantity(n, p, Dimension::Power); })
        .on("calibration", [&](auto& n, auto& p) {
            double cal_power = 2.3;
            double cal_depth = constants::boltzmann * 8.2e-3;
            Section(n, p)
                .on("power", [&](auto& n2, auto& p2) { cal_power = quantity(n2, p2, Dimension::Power); })
                .on("depth", [&](auto& n2, auto& p2) { cal_depth = quantity(n2, p2, Dimension::Energy); })
                .run();
            if (!(cal_power > 0.0)) throw ConfigError(join(p, "power"), "must be > 0");
            g.calib_depth_per_power = cal_depth / cal_power;
        })
        .on("wavelength", [&](auto& n, auto& p) { g.wavelength = quantity(n, p, Dimension::Length); })
        .on("mode_radius", [&](auto& n, auto& p) { g.mode_radius = quantity(n, p, Dimension::Length); })
        .on("fiber_length", [&](auto& n, auto& p) { g.fiber_length = quantity(n, p, Dimension::Length); })
        .on("core_radius", [&](auto& n, auto& p) { g.core_radius = quantity(n, p, Dimension::Length); })
        .on("direction", [&](auto& n, auto& p) {
            const double v = quantity(n, p, Dimension::Dimensionless);
            if (v != 1.0 && v != -1.0) throw ConfigError(p, "must be +1 or -1");
            g.propagation_sign = static_cast<int>(v);
        })
        .run();
    if (depth && power) throw ConfigError(join(path, "depth"), "give either depth or power, not both");
    if (power) g.power = *power;
    if (depth) {
        if (!(g.calib_depth_per_power > 0.0)) throw ConfigError(join(path, "calibration"), "must be > 0");
        g.power = *depth / g.calib_depth_per_power;
    }
}

void parse_field(const YAML::Node& node, const std::string& path, FieldConfig& f)
{
    Section(node, path)
        .on("guide", [&](auto& n, auto& p) { parse_guide(n, p, f.guide); })
        .on("barrier", [&](auto& n, auto& p) {
            Section(n, p)
                .on("enabled", [&](auto& n2, auto& p2) { f.barrier.enabled = boolean(n2, p2); })
                .on("height", [&](auto& n2, auto& p2) { f.barrier.height = quantity(n2, p2, Dimension::Energy); })
                .on("axial_sigma", [&](auto& n2, auto& p2) { f.barrier.axial_sigma = quantity(n2, p2, Dimension::Length); })
                .on("position", [&](auto& n2, auto& p2) { f.barrier.position = quantity(n2, p2, Dimension::Length); })
                .run();
        })
        .on("reservoir", [&](auto& n, auto& p) {
            auto& r = f.reservoir;
            Section(n, p)
                .on("enabled", [&](auto& n2, auto& p2) { r.enabled = boolean(n2, p2); })
                .on("depth", [&](auto& n2, auto& p2) { r.depth = quantity(n2, p2, Dimension::Energy); })
                .on("waist", [&](auto& n2, auto& p2) { r.waist = quantity(n2, p2, Dimension::Length); })
                .on("wavelength", [&](auto& n2, auto& p2) { r.wavelength = quantity(n2, p2, Dimension::Length); })
                .on("focus", [&](auto& n2, auto& p2) { r.focus_position = vector3(n2, p2, Dimension::Length); })
                .on("axis", [&](auto& n2, auto& p2) { r.axis = direction(n2, p2); })
                .run();
        })
        .on("gravity_up", [&](auto& n, auto& p) {
            if (n.IsScalar() && (n.Scalar() == "none" || n.Scalar() == "off")) {
                f.gravity_axis.reset();
            } else {
                f.gravity_axis = direction(n, p);
            }
        })
        .on("scattering", [&](auto& n, auto& p) {
            Section(n, p)
                .on("max_rate", [&](auto& n2, auto& p2) { f.gamma_sc_max = quantity(n2, p2, Dimension::Frequency); })
                .on("reference_depth", [&](auto& n2, auto& p2) {
                    f.gamma_sc_ref_depth = quantity(n2, p2, Dimension::Energy);
                })
                .run();
        })
        .run();
}

void parse_cloud(const YAML::Node& node, const std::string& path, CloudConfig& c, std::size_t* trajectories,
                 std::optional<double> default_peak_density)
{
    std::optional<double> atoms;
    std::optional<double> peak_density;
    Section s(node, path);
    s.on("atoms", [&](auto& n, auto& p) { atoms = quantity(n, p, Dimension::Dimensionless); })
        .on("peak_density", [&](auto& n, auto& p) { peak_density = quantity(n, p, Dimension::NumberDensity); })
        .on("temperature", [&](auto& n, auto& p) { c.temperature = quantity(n, p, Dimension::Temperature); })
        .on("center", [&](auto& n, auto& p) { c.center = vector3(n, p, Dimension::Length); })
        .on("sigma", [&](auto& n, auto& p) { c.sigma_pos = vector3(n, p, Dimension::Length, true); })
        .on("mean_velocity", [&](auto& n, auto& p) { c.mean_velocity = vector3(n, p, Dimension::Velocity); });
    if (trajectories) {
        s.on("trajectories", [&](auto& n, auto& p) { *trajectories = count(n, p); });
    }
    s.run();
    if (atoms && peak_density) throw ConfigError(join(path, "atoms"), "give either atoms or peak_density, not both");
    if (!atoms && !peak_density) {
        if (!default_peak_density) throw ConfigError(join(path, "atoms"), "atoms or peak_density is required");
        peak_density = default_peak_density;
    }
    if (atoms) c.n_atoms = *atoms;
    if (peak_density) {
        if (!(*peak_density >= 0.0)) throw ConfigError(join(path, "peak_density"), "must be >= 0");
        c.n_atoms = atoms_for_peak_density(*peak_density, c.sigma_pos);
    }
}

void parse_integrator(const YAML::Node& node, const std::string& path, IntegratorParams& ip)
{
    Section(node, path)
        .on("dt", [&](auto& n, auto& p) { ip.dt = quantity(n, p, Dimension::Time); })
        .on("t_max", [&](auto& n, auto& p) { ip.t_max = quantity(n, p, Dimension::Time); })
        .on("scattering", [&](auto& n, auto& p) { ip.enable_scattering = boolean(n, p); })
        .on("z_escape", [&](auto& n, auto& p) { ip.z_escape = quantity(n, p, Dimension::Length); })
        .run();
}

void parse_observables(const YAML::Node& node, const std::string& path, ObservablesConfig& o)
{
    Section(node, path)
        .on("flux_bin", [&](auto& n, auto& p) { o.flux_bin = quantity(n, p, Dimension::Time); })
        .on("photons_per_atom", [&](auto& n, auto& p) {
            o.photons_per_atom = quantity(n, p, Dimension::Dimensionless);
        })
        .on("photon_noise", [&](auto& n, auto& p) { o.photon_noise = boolean(n, p); })
        .on("density", [&](auto& n, auto& p) {
            auto& d = o.density;
            bool have_stop = false;
            Section(n, p)
                .on("start", [&](auto& n2, auto& p2) { d.start = quantity(n2, p2, Dimension::Time); })
                .on("stop", [&](auto& n2, auto& p2) {
                    d.stop = quantity(n2, p2, Dimension::Time);
                    have_stop = true;
                })
                .on("snapshots", [&](auto& n2, auto& p2) { d.snapshots = count(n2, p2); })
                .on("radial_bin", [&](auto& n2, auto& p2) { d.radial_bin = quantity(n2, p2, Dimension::Length); })
                .on("axial_bin", [&](auto& n2, auto& p2) { d.axial_bin = quantity(n2, p2, Dimension::Length); })
                .run();
            if (!have_stop) d.stop = d.start;
        })
        .run();
}

} // namespace

ScenarioConfig parse_scenario_config(std::string_view yaml_text, const std::string& origin)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin, std::string("YAML syntax error: ") + e.what());
    }

    ScenarioConfig cfg;
    cfg.cloud = default_molasses_cloud();
    try {
        Section(root, "")
            .on("seed", [&](auto& n, auto& p) { cfg.master_seed = count(n, p); })
            .on("trajectories", [&](auto& n, auto& p) { cfg.n_trajectories = count(n, p); })
            .on("workers", [&](auto& n, auto& p) { cfg.workers = static_cast<unsigned>(count(n, p)); })
            .on("output_dir", [&](auto& n, auto& p) { cfg.output_dir = scalar(n, p); })
            .on("species", [&](auto& n, auto& p) { cfg.species = parse_species(n, p); })
            .on("field", [&](auto& n, auto& p) { parse_field(n, p, cfg.field); })
            .on("cloud", [&](auto& n, auto& p) { parse_cloud(n, p, cfg.cloud, nullptr, kMolassesPeakDensity); })
            .on("reservoir_cloud", [&](auto& n, auto& p) {
                CloudConfig c;
                c.n_atoms = 0.0;
                parse_cloud(n, p, c, &cfg.reservoir_trajectories, std::nullopt);
                cfg.reservoir_cloud = c;
            })
            .on("integrator", [&](auto& n, auto& p) { parse_integrator(n, p, cfg.integrator); })
            .on("observables", [&](auto& n, auto& p) { parse_observables(n, p, cfg.observables); })
            .run();
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin, std::string("YAML error: ") + e.what());
    }
    cfg.field.gravity_mass = cfg.species.mass;
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path)
{
    return parse_scenario_config(read_text_file(path), path.string());
}

} // namespace fiberguide
