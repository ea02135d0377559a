#pragma once

// Reference computations that do not share code with the integrator.

#include <cmath>
#include <functional>

#include "fiberguide/dynamics.hpp"

namespace fiberguide::oracle {

/// Classical fourth-order Runge-Kutta for x'' = F(x)/m over `steps` steps.
inline AtomState rk4(AtomState s, double dt, std::size_t steps, const Field& field, const AtomSpecies& species)
{
    const double inv_m = 1.0 / species.mass;
    const auto acc = [&](const Vec3& x) { return field.force(x) * inv_m; };
    const double t0 = s.time;
    for (std::size_t n = 1; n <= steps; ++n) {
        const Vec3 x = s.position, v = s.velocity;
        const Vec3 k1x = v, k1v = acc(x);
        const Vec3 k2x = v + 0.5 * dt * k1v, k2v = acc(x + 0.5 * dt * k1x);
        const Vec3 k3x = v + 0.5 * dt * k2v, k3v = acc(x + 0.5 * dt * k2x);
        const Vec3 k4x = v + dt * k3v, k4v = acc(x + dt * k3x);
        s.position = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        s.velocity = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s.time = t0 + static_cast<double>(n) * dt;
    }
    return s;
}

/// On-axis guide potential, written out from the Gaussian-beam closed form.
inline double axial_potential(double z, double depth, double zr, double length)
{
    if (z >= 0.0 && z <= length) return -depth;
    const double d = z < 0.0 ? -z : z - length;
    return -depth / (1.0 + d * d / (zr * zr));
}

/// Time for an atom released at rest on the axis at z0 < 0 to reach the exit
/// facet, from energy conservation: t = int dz / v(z). The substitution
/// z = z0 + s^2 removes the turning-point singularity; Simpson's rule in s.
inline double on_axis_arrival_time(double z0, double depth, double zr, double length, double mass,
                                   int intervals = 200000)
{
    const double u_start = axial_potential(z0, depth, zr, length);
    const auto speed = [&](double z) { return std::sqrt(2.0 * (u_start - axial_potential(z, depth, zr, length)) / mass); };
    // dU/dz at the start gives the s -> 0 limit of 2 s / v.
    const double u = -z0 / zr;
    const double force = depth * 2.0 * u / ((1.0 + u * u) * (1.0 + u * u)) / zr;
    const double limit0 = 2.0 / std::sqrt(2.0 * force / mass);
    const auto integrand = [&](double s) { return s == 0.0 ? limit0 : 2.0 * s / speed(z0 + s * s); };

    const double S = std::sqrt(-z0);
    const double h = S / intervals;
    double sum = integrand(0.0) + integrand(S);
    for (int i = 1; i < intervals; ++i) sum += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
    const double fall = sum * h / 3.0;
    return fall + length / speed(0.0);
}

} // namespace fiberguide::oracle
