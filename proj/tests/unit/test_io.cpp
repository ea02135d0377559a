#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "fiberguide/config.hpp"
#include "fiberguide/csv.hpp"
#include "fiberguide/errors.hpp"

using namespace fiberguide;
namespace fs = std::filesystem;

namespace {

constexpr double kB = 1.380649e-23;

std::string config_error_field(const std::string& yaml)
{
    try {
        parse_scenario_config(yaml);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("fiberguide_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("number formatting round-trips")
{
    for (double v : {0.0, 1.0, -2.5, 1.132e-25, 6.02214076e23, 0.1, 1.0 / 3.0, 69.5e-3, 5e-324}) {
        CHECK(parse_number(format_number(v)) == v);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()).empty());
    CHECK(std::isnan(parse_number("")));
    CHECK(parse_number("1e-3") == 1e-3);
    CHECK(format_count(12345) == "12345");
    CHECK(parse_count("12345") == 12345);
    CHECK_THROWS_AS(parse_number("1.0x"), ParameterError);
    CHECK_THROWS_AS(parse_number(" 1"), ParameterError);
    CHECK_THROWS_AS(parse_count("-1"), ParameterError);
    CHECK_THROWS_AS(parse_count("1.5"), ParameterError);
}

TEST_CASE("csv text round-trip is byte identical")
{
    CsvTable t;
    t.header = {"t_start_s", "flux_atoms_per_s"};
    t.rows = {{format_number(0.0), format_number(0.0)}, {format_number(0.011), format_number(272.72727272727275)}};
    const auto text = to_csv_text(t);
    CHECK(text == "t_start_s,flux_atoms_per_s\n0,0\n0.011,272.72727272727275\n");
    const auto parsed = parse_csv_text(text);
    CHECK(parsed.header == t.header);
    CHECK(parsed.rows == t.rows);
    CHECK(to_csv_text(parsed) == text);
    CHECK(parsed.column("flux_atoms_per_s") == 1);
    CHECK_THROWS_AS(parsed.column("missing"), IoError);

    CHECK(parse_csv_text("a,b\r\n1,2\r\n").rows.at(0).at(1) == "2");
    CHECK(parse_csv_text("a,b\n").rows.empty());
    CHECK_THROWS_AS(parse_csv_text("a,b\n1\n"), IoError);
    CHECK_THROWS_AS(parse_csv_text(""), IoError);

    CsvTable bad;
    bad.header = {"a"};
    bad.rows = {{"x,y"}};
    CHECK_THROWS_AS(to_csv_text(bad), ParameterError);
}

TEST_CASE("csv files")
{
    const auto dir = scratch_dir("csv");
    CsvTable t;
    t.header = {"x", "y"};
    t.rows = {{"1", "2"}};
    write_csv(dir / "t.csv", t);
    CHECK(read_csv(dir / "t.csv").rows == t.rows);
    CHECK_THROWS_AS(read_csv(dir / "absent.csv"), IoError);
    CHECK_THROWS_AS(write_csv(dir / "no_such_dir" / "t.csv", t), IoError);
    try {
        read_text_file(dir / "absent.csv");
    } catch (const IoError& e) {
        CHECK(e.path().find("absent.csv") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("empty config gives the defaults")
{
    const auto cfg = parse_scenario_config("");
    CHECK(cfg.n_trajectories == 1000);
    CHECK(cfg.master_seed == 1);
    CHECK(cfg.field.guide.depth() == doctest::Approx(kB * 8.2e-3).epsilon(1e-14));
    CHECK_FALSE(cfg.field.barrier.enabled);
    CHECK_FALSE(cfg.field.gravity_axis.has_value());
    CHECK_FALSE(cfg.reservoir_cloud.has_value());
    CHECK(cfg.cloud.center.z == doctest::Approx(-200e-6));
    CHECK(density_weight(cfg.cloud) == doctest::Approx(1.5e17).epsilon(1e-12));
    CHECK(cfg.observables.flux_bin == doctest::Approx(11e-3));
    CHECK(cfg.observables.photons_per_atom == 41.0);
}

TEST_CASE("full config parses with units")
{
    const auto cfg = parse_scenario_config(R"(
seed: 42
trajectories: 250
workers: 2
output_dir: runs/a
species: Rb85
field:
  guide:
    depth: 4.1 mK
    mode_radius: 4.5 um
    fiber_length: 88 mm
    core_radius: 6 um
    wavelength: 1067 nm
    direction: -1
  barrier: {enabled: true, height: 2.1 mK, axial_sigma: 10 um, position: 0 um}
  reservoir: {enabled: yes, depth: 2.2 mK, waist: 27 um, wavelength: 782 nm, focus: [0 um, 0 um, -100 um], axis: [1, 0, 0]}
  gravity_up: [0, 1, 0]
  scattering: {max_rate: 120 Hz, reference_depth: 8.2 mK}
cloud:
  peak_density: 1.5e11 cm^-3
  temperature: 10 uK
  center: [0 um, 0 um, -150 um]
  sigma: [40 um, 40 um, 60 um]
  mean_velocity: [0 m/s, 0 m/s, 1 cm/s]
reservoir_cloud:
  atoms: 1.8e6
  trajectories: 400
  temperature: 38 uK
  center: [0 um, 0 um, -100 um]
  sigma: 10 um
integrator: {dt: 0.2 us, t_max: 400 ms, scattering: off, z_escape: -5 mm}
observables:
  flux_bin: 11 ms
  photons_per_atom: 41
  photon_noise: false
  density: {start: 10 ms, stop: 60 ms, snapshots: 11, radial_bin: 0.25 um, axial_bin: 1 mm}
)");
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.n_trajectories == 250);
    CHECK(cfg.workers == 2);
    CHECK(cfg.output_dir == fs::path("runs/a"));
    CHECK(cfg.field.guide.depth() == doctest::Approx(kB * 4.1e-3).epsilon(1e-12));
    CHECK(cfg.field.guide.power == doctest::Approx(1.15).epsilon(1e-12));
    CHECK(cfg.field.guide.propagation_sign == -1);
    CHECK(cfg.field.barrier.enabled);
    CHECK(cfg.field.barrier.height == doctest::Approx(kB * 2.1e-3));
    CHECK(cfg.field.reservoir.enabled);
    CHECK(cfg.field.reservoir.focus_position.z == doctest::Approx(-100e-6));
    REQUIRE(cfg.field.gravity_axis.has_value());
    CHECK(cfg.field.gravity_axis->y == 1.0);
    CHECK(cfg.field.gravity_mass == cfg.species.mass);
    CHECK(cfg.cloud.sigma_pos.z == doctest::Approx(60e-6));
    CHECK(density_weight(cfg.cloud) == doctest::Approx(1.5e17).epsilon(1e-12));
    CHECK(cfg.cloud.mean_velocity.z == doctest::Approx(0.01));
    REQUIRE(cfg.reservoir_cloud.has_value());
    CHECK(cfg.reservoir_cloud->n_atoms == 1.8e6);
    CHECK(cfg.reservoir_cloud->temperature == doctest::Approx(38e-6));
    CHECK(cfg.reservoir_cloud->sigma_pos.x == doctest::Approx(10e-6));
    CHECK(cfg.reservoir_trajectories == 400);
    CHECK(cfg.integrator.t_max == doctest::Approx(0.4));
    CHECK_FALSE(cfg.integrator.enable_scattering);
    CHECK_FALSE(cfg.observables.photon_noise);
    CHECK(cfg.observables.density.snapshots == 11);
    CHECK(cfg.observables.density.times().front() == doctest::Approx(10e-3));
    CHECK(cfg.observables.density.times().back() == doctest::Approx(60e-3));
}

TEST_CASE("guide power and calibration")
{
    const auto cfg = parse_scenario_config("field: {guide: {power: 1 W, calibration: {power: 2 W, depth: 6 mK}}}");
    CHECK(cfg.field.guide.depth() == doctest::Approx(kB * 3e-3).epsilon(1e-12));
}

TEST_CASE("config errors name the offending key")
{
    CHECK(config_error_field("trajectories: 0") == "trajectories");
    CHECK(config_error_field("trajectorys: 10") == "trajectorys");
    CHECK(config_error_field("field: {guide: {depht: 3 mK}}") == "field.guide.depht");
    CHECK(config_error_field("field: {guide: {depth: 3 mm}}") == "field.guide.depth");
    CHECK(config_error_field("field: {guide: {depth: 3}}") == "field.guide.depth");
    CHECK(config_error_field("field: {guide: {depth: 3 mK, power: 1 W}}") == "field.guide.depth");
    CHECK(config_error_field("field: {barrier: {enabled: maybe}}") == "field.barrier.enabled");
    CHECK(config_error_field("field: {reservoir: {axis: [0, 0]}}") == "field.reservoir.axis");
    CHECK(config_error_field("cloud: {temperature: -1 uK}") == "cloud");
    CHECK(config_error_field("cloud: {atoms: 10, peak_density: 1e17 m^-3}") == "cloud.atoms");
    CHECK(config_error_field("reservoir_cloud: {temperature: 38 uK}") == "reservoir_cloud.atoms");
    CHECK(config_error_field("integrator: {dt: 5 us}") == "integrator");
    CHECK(config_error_field("observables: {density: {start: 1 s}}") == "observables.density.stop");
    CHECK(config_error_field("species: Cs133") == "species");
    CHECK(config_error_field("seed: [1, 2]") == "seed");
    CHECK(config_error_field("field: 3") == "field");
    CHECK(config_error_field("a: [unclosed") == "<memory>");
    CHECK_THROWS_AS(load_scenario_config("/nonexistent/config.yaml"), IoError);
}

TEST_CASE("config files load from disk")
{
    const auto dir = scratch_dir("config");
    write_text_file(dir / "c.yaml", "seed: 9\ntrajectories: 10\n");
    const auto cfg = load_scenario_config(dir / "c.yaml");
    CHECK(cfg.master_seed == 9);
    CHECK(cfg.n_trajectories == 10);
    write_text_file(dir / "bad.yaml", "sed: 9\n");
    try {
        load_scenario_config(dir / "bad.yaml");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "sed");
    }
    fs::remove_all(dir);
}

TEST_CASE("shipped example configs")
{
    for (const char* name : {"molasses", "reservoir", "scaling_sweep", "barrier_sweep"}) {
        CAPTURE(name);
        const auto cfg = load_scenario_config(fs::path(FIBERGUIDE_CONFIG_DIR) / (std::string(name) + ".yaml"));
        CHECK_NOTHROW(cfg.validate());
    }
    const auto res = load_scenario_config(fs::path(FIBERGUIDE_CONFIG_DIR) / "reservoir.yaml");
    REQUIRE(res.reservoir_cloud.has_value());
    CHECK(res.field.reservoir.enabled);
    const auto mol = load_scenario_config(fs::path(FIBERGUIDE_CONFIG_DIR) / "molasses.yaml");
    CHECK(mol.field.guide.depth() == doctest::Approx(kB * 8.2e-3).epsilon(1e-12));
    CHECK(density_weight(mol.cloud) == doctest::Approx(1.5e17).epsilon(1e-12));
}

TEST_CASE("density window")
{
    DensityWindow w;
    w.start = 0.01;
    w.stop = 0.05;
    w.snapshots = 5;
    const auto t = w.times();
    REQUIRE(t.size() == 5);
    CHECK(t[1] == doctest::Approx(0.02));
    CHECK_NOTHROW(w.validate(0.1));
    CHECK_THROWS_AS(w.validate(0.05), ConfigError);
    w.snapshots = 0;
    CHECK_THROWS_AS(w.validate(0.1), ConfigError);
}
