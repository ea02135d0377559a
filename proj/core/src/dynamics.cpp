#include "fiberguide/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "fiberguide/errors.hpp"

namespace fiberguide {

void IntegratorParams::validate() const
{
    if (!(dt > 0.0)) throw ParameterError("integrator.dt must be > 0");
    if (!(t_max > dt)) throw ParameterError("integrator.t_max must exceed dt");
}

void IntegratorParams::check_stability(const Field& field, const AtomSpecies& species) const
{
    validate();
    const double product = field.radial_frequency(species.mass) * dt;
    if (!(product < kMaxStabilityProduct)) {
        throw ParameterError("integrator.dt too large: omega_r * dt = " + std::to_string(product) +
                             " (must be < 0.3)");
    }
}

std::string_view to_string(OutcomeKind kind)
{
    switch (kind) {
    case OutcomeKind::Transmitted: return "Transmitted";
    case OutcomeKind::LostWall: return "LostWall";
    case OutcomeKind::LostBack: return "LostBack";
    case OutcomeKind::TimedOut: return "TimedOut";
    case OutcomeKind::Failed: return "Failed";
    }
    return "?";
}

OutcomeKind outcome_kind_from_string(std::string_view text)
{
    for (auto k : {OutcomeKind::Transmitted, OutcomeKind::LostWall, OutcomeKind::LostBack,
                   OutcomeKind::TimedOut, OutcomeKind::Failed}) {
        if (to_string(k) == text) return k;
    }
    throw ParameterError("unknown outcome kind '" + std::string(text) + "'");
}

double total_energy(const AtomState& s, const Field& field, const AtomSpecies& species)
{
    return 0.5 * species.mass * norm2(s.velocity) + field.potential(s.position);
}

namespace {

struct Kernel {
    const Field& field;
    double inv_mass;
    double dt;

    // Advances `s` by one step. `f` holds the force at the current position
    // on entry and at the new position on exit.
    void advance(AtomState& s, Field::Sample& f) const
    {
        const double half = 0.5 * dt * inv_mass;
        s.velocity += half * f.force;
        s.position += dt * s.velocity;
        f = field.sample(s.position);
        if (!is_finite(f.force)) throw NumericalError("non-finite force", s.position);
        s.velocity += half * f.force;
    }
};

void apply_recoils(AtomState& s, const Field& field, const AtomSpecies& species, Rng& rng)
{
    const double v_rec = recoil_speed(species, field.config().guide.wavelength);
    s.velocity += v_rec * field.propagation_direction();
    s.velocity += v_rec * isotropic_direction(rng);
    ++s.scatter_count;
}

bool scatter_trial(AtomState& s, double rate, double dt, const Field& field,
                   const AtomSpecies& species, Rng& rng)
{
    const double p = rate * dt;
    if (!(p < kMaxScatterProbability)) {
        throw ParameterError("scattering probability per step " + std::to_string(p) +
                             " exceeds 0.1; reduce dt");
    }
    const double u = uniform01(rng);
    if (u >= p) return false;
    apply_recoils(s, field, species, rng);
    return true;
}

} // namespace

AtomState step(const AtomState& state, double dt, const Field& field, const AtomSpecies& species)
{
    AtomState next = state;
    Field::Sample f = field.sample(state.position);
    if (!is_finite(f.force)) throw NumericalError("non-finite force", state.position);
    Kernel{field, 1.0 / species.mass, dt}.advance(next, f);
    next.time = state.time + dt;
    return next;
}

Vec3 isotropic_direction(Rng& rng)
{
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double phi = 2.0 * constants::pi * uniform01(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    return {s * std::cos(phi), s * std::sin(phi), u};
}

AtomState maybe_scatter(const AtomState& state, double dt, const Field& field,
                        const AtomSpecies& species, Rng& rng)
{
    AtomState next = state;
    scatter_trial(next, field.scattering_rate(state.position), dt, field, species, rng);
    return next;
}

TrajectoryOutcome propagate(const AtomState& initial, const Field& field, const AtomSpecies& species,
                            const IntegratorParams& params, std::uint64_t seed,
                            SnapshotRequest* snapshots)
{
    params.check_stability(field, species);
    if (!is_finite(initial.position) || !is_finite(initial.velocity) || !std::isfinite(initial.time)) {
        throw NumericalError("non-finite initial state", initial.position);
    }

    const auto& guide = field.config().guide;
    const double length = guide.fiber_length;
    const double core2 = guide.core_radius * guide.core_radius;
    const auto r2_of = [](const Vec3& p) { return p.x * p.x + p.y * p.y; };

    std::size_t next_snapshot = 0;
    if (snapshots) {
        snapshots->states.assign(snapshots->times.size(), std::nullopt);
    }
    const auto record_snapshots = [&](const AtomState& s) {
        if (!snapshots) return;
        while (next_snapshot < snapshots->times.size() && snapshots->times[next_snapshot] <= s.time) {
            snapshots->states[next_snapshot++] = s;
        }
    };

    TrajectoryOutcome out;
    AtomState s = initial;
    const auto finish = [&](OutcomeKind kind) {
        out.kind = kind;
        out.scatter_count = s.scatter_count;
        out.final_state = s;
        return out;
    };

    if (s.position.z >= 0.0 && s.position.z <= length && r2_of(s.position) >= core2) {
        return finish(OutcomeKind::LostWall);
    }
    record_snapshots(s);
    if (s.time >= params.t_max) return finish(OutcomeKind::TimedOut);

    Rng rng(seed);
    const Kernel kernel{field, 1.0 / species.mass, params.dt};
    Field::Sample f = field.sample(s.position);
    if (!is_finite(f.force)) throw NumericalError("non-finite force", s.position);

    const double t0 = s.time;
    for (std::uint64_t n = 1;; ++n) {
        const Vec3 x_prev = s.position;
        const Vec3 v_prev = s.velocity;
        const double t_prev = s.time;

        kernel.advance(s, f);
        s.time = t0 + static_cast<double>(n) * params.dt;
        if (!is_finite(s.velocity)) throw NumericalError("non-finite velocity", s.position);

        const Vec3& x = s.position;
        if (x_prev.z < length && x.z >= length) {
            const double frac = (length - x_prev.z) / (x.z - x_prev.z);
            const Vec3 x_cross = x_prev + frac * (x - x_prev);
            if (r2_of(x_cross) < core2) {
                out.arrival_time = t_prev + frac * params.dt;
                out.exit_velocity = v_prev + frac * (s.velocity - v_prev);
                return finish(OutcomeKind::Transmitted);
            }
            return finish(OutcomeKind::LostWall);
        }
        if (x.z >= 0.0 && x.z <= length && r2_of(x) >= core2) return finish(OutcomeKind::LostWall);
        if (x.z < params.z_escape && s.velocity.z < 0.0) return finish(OutcomeKind::LostBack);
        if (std::isnan(out.entry_time) && x_prev.z < 0.0 && x.z >= 0.0) {
            const double frac = -x_prev.z / (x.z - x_prev.z);
            out.entry_time = t_prev + frac * params.dt;
        }

        if (params.enable_scattering) {
            scatter_trial(s, field.scattering_rate_from_guide(f.guide_potential), params.dt, field,
                          species, rng);
        }
        record_snapshots(s);
        if (s.time >= params.t_max) return finish(OutcomeKind::TimedOut);
    }
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index)
{
    // splitmix64 finalizer over a mix of both inputs
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master_seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL));
}

EnsembleResult propagate_ensemble(std::span<const AtomState> atoms, const Field& field,
                                  const AtomSpecies& species, const IntegratorParams& params,
                                  std::uint64_t master_seed, const EnsembleOptions& options)
{
    params.check_stability(field, species);

    EnsembleResult result;
    result.outcomes.resize(atoms.size());
    result.snapshots.assign(options.snapshot_times.size(),
                            std::vector<std::optional<AtomState>>(atoms.size()));

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        SnapshotRequest request{options.snapshot_times, {}};
        for (std::size_t i = next.fetch_add(1); i < atoms.size(); i = next.fetch_add(1)) {
            try {
                result.outcomes[i] = propagate(atoms[i], field, species, params,
                                               derive_seed(master_seed, i), &request);
                for (std::size_t k = 0; k < request.states.size(); ++k) {
                    result.snapshots[k][i] = request.states[k];
                }
            } catch (const std::exception& e) {
                auto& o = result.outcomes[i];
                o = TrajectoryOutcome{};
                o.kind = OutcomeKind::Failed;
                o.final_state = atoms[i];
                o.error = e.what();
            }
        }
    };

    unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(atoms.size(), 1)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return result;
}

} // namespace fiberguide
