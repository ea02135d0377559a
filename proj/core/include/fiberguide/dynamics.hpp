#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fiberguide/ensemble.hpp"
#include "fiberguide/potential.hpp"

namespace fiberguide {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct IntegratorParams {
    double dt = 2e-7;           // s
    double t_max = 0.5;         // s
    bool enable_scattering = true;
    double z_escape = -5e-3;    // m; LostBack below this when moving away

    void validate() const;
    /// Throws ParameterError unless omega_r * dt < 0.3 for the deepest
    /// in-fiber radial well.
    void check_stability(const Field& field, const AtomSpecies& species) const;
};

inline constexpr double kMaxStabilityProduct = 0.3;
inline constexpr double kMaxScatterProbability = 0.1;

enum class OutcomeKind { Transmitted, LostWall, LostBack, TimedOut, Failed };

std::string_view to_string(OutcomeKind kind);
OutcomeKind outcome_kind_from_string(std::string_view text);

struct TrajectoryOutcome {
    OutcomeKind kind = OutcomeKind::TimedOut;
    /// Exit-facet crossing time, interpolated within the final step.
    double arrival_time = std::numeric_limits<double>::quiet_NaN();
    Vec3 exit_velocity{};
    std::uint64_t scatter_count = 0;
    AtomState final_state{};
    /// First forward crossing of the input facet inside the core; NaN if none.
    double entry_time = std::numeric_limits<double>::quiet_NaN();
    /// Set only for OutcomeKind::Failed.
    std::string error;

    bool transmitted() const noexcept { return kind == OutcomeKind::Transmitted; }
};

/// Total mechanical energy, kinetic plus potential.
double total_energy(const AtomState& s, const Field& field, const AtomSpecies& species);

/// One velocity-Verlet step in the conservative field.
AtomState step(const AtomState& state, double dt, const Field& field, const AtomSpecies& species);

/// Bernoulli trial for one scattering event with probability Gamma_sc(x) dt;
/// an event adds an absorption kick along the guide propagation direction and
/// an isotropic emission kick, both of magnitude h / (m lambda_guide).
AtomState maybe_scatter(const AtomState& state, double dt, const Field& field,
                        const AtomSpecies& species, Rng& rng);

/// Random unit vector, uniform on the sphere.
Vec3 isotropic_direction(Rng& rng);

/// Times at which a trajectory's state is recorded if it is still alive.
struct SnapshotRequest {
    std::span<const double> times;
    std::vector<std::optional<AtomState>> states; // filled by propagate
};

TrajectoryOutcome propagate(const AtomState& initial, const Field& field, const AtomSpecies& species,
                            const IntegratorParams& params, std::uint64_t seed,
                            SnapshotRequest* snapshots = nullptr);

/// Seed for trajectory `index`; pure function of both arguments.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

struct EnsembleOptions {
    unsigned workers = 0; // 0 = hardware concurrency
    std::span<const double> snapshot_times{};
};

struct EnsembleResult {
    std::vector<TrajectoryOutcome> outcomes;
    /// snapshots[k][i]: state of atom i at snapshot_times[k], if alive.
    std::vector<std::vector<std::optional<AtomState>>> snapshots;
};

/// Outcome i equals propagate(atoms[i], ..., derive_seed(master_seed, i)),
/// independent of the worker count. Per-atom exceptions become Failed
/// outcomes.
EnsembleResult propagate_ensemble(std::span<const AtomState> atoms, const Field& field,
                                  const AtomSpecies& species, const IntegratorParams& params,
                                  std::uint64_t master_seed, const EnsembleOptions& options = {});

} // namespace fiberguide
