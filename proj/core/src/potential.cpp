#include "fiberguide/potential.hpp"

#include <cmath>

#include "fiberguide/errors.hpp"

namespace fiberguide {

namespace {

// Terms smaller than e^-40 of their depth are dropped; far-field atoms then
// skip the exponential entirely.
constexpr double kExpCutoff = 40.0;

bool is_unit(const Vec3& v) { return std::abs(norm(v) - 1.0) < 1e-9; }

} // namespace

void GuideBeamConfig::validate() const
{
    if (!(power >= 0.0)) throw ParameterError("guide.power must be >= 0");
    if (!(calib_depth_per_power >= 0.0)) throw ParameterError("guide.calibration must be >= 0");
    if (!(wavelength > 0.0)) throw ParameterError("guide.wavelength must be > 0");
    if (!(mode_radius > 0.0 && mode_radius < core_radius)) {
        throw ParameterError("guide.mode_radius must satisfy 0 < mode_radius < core_radius");
    }
    if (!(fiber_length > 0.0)) throw ParameterError("guide.fiber_length must be > 0");
    if (propagation_sign != 1 && propagation_sign != -1) {
        throw ParameterError("guide.propagation_sign must be +1 or -1");
    }
}

void FacetBarrierConfig::validate() const
{
    if (!(height >= 0.0)) throw ParameterError("barrier.height must be >= 0");
    if (!(axial_sigma > 0.0)) throw ParameterError("barrier.axial_sigma must be > 0");
}

void ReservoirBeamConfig::validate() const
{
    if (!(depth >= 0.0)) throw ParameterError("reservoir.depth must be >= 0");
    if (!(waist > 0.0)) throw ParameterError("reservoir.waist must be > 0");
    if (!(wavelength > 0.0)) throw ParameterError("reservoir.wavelength must be > 0");
    if (!is_unit(axis)) throw ParameterError("reservoir.axis must be a unit vector");
}

void FieldConfig::validate() const
{
    guide.validate();
    barrier.validate();
    reservoir.validate();
    if (gravity_axis && !is_unit(*gravity_axis)) {
        throw ParameterError("gravity_axis must be a unit vector");
    }
    if (!(gravity_mass > 0.0)) throw ParameterError("gravity mass must be > 0");
    if (!(gamma_sc_max >= 0.0)) throw ParameterError("gamma_sc_max must be >= 0");
    if (!(gamma_sc_ref_depth > 0.0)) throw ParameterError("gamma_sc_ref_depth must be > 0");
}

double mode_radius_at(double z, const GuideBeamConfig& guide)
{
    const double w0 = guide.mode_radius;
    double d = 0.0;
    if (z < 0.0) {
        d = -z;
    } else if (z > guide.fiber_length) {
        d = z - guide.fiber_length;
    } else {
        return w0;
    }
    const double zr = guide.rayleigh_range();
    return w0 * std::sqrt(1.0 + (d / zr) * (d / zr));
}

double depth_from_power(double power, const GuideBeamConfig& guide)
{
    if (!(power >= 0.0)) throw DomainError("guide power must be >= 0 W");
    return guide.calib_depth_per_power * power;
}

Field::Field(FieldConfig config)
    : cfg_(std::move(config))
{
    cfg_.validate();
    depth_ = cfg_.guide.depth();
    length_ = cfg_.guide.fiber_length;
    w0_sq_ = cfg_.guide.mode_radius * cfg_.guide.mode_radius;
    const double zr = cfg_.guide.rayleigh_range();
    inv_zr_sq_ = 1.0 / (zr * zr);
    barrier_inv_sigma_sq_ = 1.0 / (cfg_.barrier.axial_sigma * cfg_.barrier.axial_sigma);
    res_waist_sq_ = cfg_.reservoir.waist * cfg_.reservoir.waist;
    const double rzr = cfg_.reservoir.rayleigh_range();
    res_inv_zr_sq_ = 1.0 / (rzr * rzr);
    res_axis_ = cfg_.reservoir.axis;
}

// U = -U0 s exp(-2 r^2 s / w0^2), s = (w0/w(z))^2 = 1 / (1 + d^2/zR^2).
void Field::add_guide(const Vec3& p, Sample& out) const noexcept
{
    if (depth_ == 0.0) return;
    const double r2 = p.x * p.x + p.y * p.y;

    double s = 1.0;
    double ds_dz = 0.0;
    if (p.z < 0.0 || p.z > length_) {
        const double d = p.z < 0.0 ? -p.z : p.z - length_;
        const double dd_dz = p.z < 0.0 ? -1.0 : 1.0;
        s = 1.0 / (1.0 + d * d * inv_zr_sq_);
        ds_dz = -2.0 * s * s * d * inv_zr_sq_ * dd_dz;
    }
    const double q = 2.0 * r2 * s / w0_sq_;
    if (q > kExpCutoff) return;
    const double e = std::exp(-q);
    const double u = -depth_ * s * e;

    out.potential += u;
    out.guide_potential += u;
    // dU/dx = -U * 4 x s / w0^2 ... so F_x = U * 4 x s / w0^2
    const double radial = u * 4.0 * s / w0_sq_;
    out.force.x += radial * p.x;
    out.force.y += radial * p.y;
    // dU/ds = -U0 e^{-q} (1 - q)
    out.force.z += depth_ * e * (1.0 - q) * ds_dz;
}

// B = h exp(-(z - z_b)^2 / sigma^2) exp(-2 r^2 / w0^2)
void Field::add_barrier(const Vec3& p, Sample& out) const noexcept
{
    const auto& b = cfg_.barrier;
    if (!b.enabled || b.height == 0.0) return;
    const double dz = p.z - b.position;
    const double a = dz * dz * barrier_inv_sigma_sq_;
    const double q = 2.0 * (p.x * p.x + p.y * p.y) / w0_sq_;
    if (a + q > kExpCutoff) return;
    const double u = b.height * std::exp(-a - q);
    out.potential += u;
    const double radial = u * 4.0 / w0_sq_;
    out.force.x += radial * p.x;
    out.force.y += radial * p.y;
    out.force.z += u * 2.0 * dz * barrier_inv_sigma_sq_;
}

// Free Gaussian beam along its own axis:
// U = -D S exp(-2 rho^2 S / W^2), S = 1 / (1 + s^2 / zR^2).
void Field::add_reservoir(const Vec3& p, Sample& out) const noexcept
{
    const auto& res = cfg_.reservoir;
    if (!res.enabled || res.depth == 0.0) return;
    const Vec3 d = p - res.focus_position;
    const double s_ax = dot(d, res_axis_);
    const Vec3 perp = d - s_ax * res_axis_;
    const double rho2 = norm2(perp);
    const double S = 1.0 / (1.0 + s_ax * s_ax * res_inv_zr_sq_);
    const double q = 2.0 * rho2 * S / res_waist_sq_;
    if (q > kExpCutoff) return;
    const double e = std::exp(-q);
    const double u = -res.depth * S * e;
    out.potential += u;
    // grad rho^2 = 2 perp; dU/drho^2 = -U * 2 S / W^2
    const double dU_drho2 = -u * 2.0 * S / res_waist_sq_;
    // dU/dS = -D e (1 - q); dS/ds = -2 S^2 s / zR^2
    const double dU_ds = -res.depth * e * (1.0 - q) * (-2.0 * S * S * s_ax * res_inv_zr_sq_);
    out.force -= (2.0 * dU_drho2) * perp + dU_ds * res_axis_;
}

Field::Sample Field::sample(const Vec3& pos) const noexcept
{
    Sample out;
    add_guide(pos, out);
    add_barrier(pos, out);
    add_reservoir(pos, out);
    if (cfg_.gravity_axis) {
        const double mg = cfg_.gravity_mass * constants::gravity_accel;
        out.potential += mg * dot(pos, *cfg_.gravity_axis);
        out.force -= mg * *cfg_.gravity_axis;
    }
    return out;
}

double Field::potential(const Vec3& pos) const noexcept { return sample(pos).potential; }

Vec3 Field::force(const Vec3& pos) const noexcept { return sample(pos).force; }

double Field::guide_potential(const Vec3& pos) const noexcept
{
    Sample out;
    add_guide(pos, out);
    return out.guide_potential;
}

double Field::scattering_rate(const Vec3& pos) const noexcept
{
    return scattering_rate_from_guide(guide_potential(pos));
}

double Field::radial_frequency(double mass) const noexcept
{
    return std::sqrt(4.0 * depth_ / (mass * w0_sq_));
}

double potential(const Vec3& pos, const FieldConfig& field) { return Field(field).potential(pos); }

Vec3 force(const Vec3& pos, const FieldConfig& field) { return Field(field).force(pos); }

double scattering_rate(const Vec3& pos, const FieldConfig& field)
{
    return Field(field).scattering_rate(pos);
}

} // namespace fiberguide
