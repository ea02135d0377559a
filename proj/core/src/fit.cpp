#include "fiberguide/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "fiberguide/errors.hpp"

namespace fiberguide {

std::string_view to_string(FitModel model) noexcept
{
    switch (model) {
    case FitModel::PowerLaw: return "power_law";
    case FitModel::SqrtThreshold: return "sqrt_threshold";
    case FitModel::Linear: return "linear";
    }
    return "?";
}

FitModel fit_model_from_string(std::string_view text)
{
    if (text == "power" || text == "power_law" || text == "power-law") return FitModel::PowerLaw;
    if (text == "sqrt-threshold" || text == "sqrt_threshold") return FitModel::SqrtThreshold;
    if (text == "linear") return FitModel::Linear;
    throw ParameterError("unknown fit model '" + std::string(text) +
                         "' (expected power, sqrt-threshold or linear)");
}

const FitParameter& FitResult::parameter(std::string_view name) const
{
    for (const auto& p : parameters) {
        if (p.name == name) return p;
    }
    throw FitError("fit result has no parameter '" + std::string(name) + "'");
}

double FitResult::evaluate(double x) const
{
    switch (model) {
    case FitModel::PowerLaw: return value("A") * std::pow(x, value("p"));
    case FitModel::SqrtThreshold: return value("A") * std::sqrt(std::max(x - value("x0"), 0.0));
    case FitModel::Linear: return value("a") * x + value("b");
    }
    return 0.0;
}

namespace {

void require_points(std::span<const DataPoint> points, std::size_t minimum, std::string_view model)
{
    if (points.size() < minimum) {
        throw FitError(std::string(model) + " fit needs at least " + std::to_string(minimum) +
                       " points, got " + std::to_string(points.size()));
    }
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw FitError(std::string(model) + " fit: non-finite data point");
        }
    }
    const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                              [](const DataPoint& a, const DataPoint& b) { return a.x < b.x; });
    if (lo->x == hi->x) throw FitError(std::string(model) + " fit: degenerate data, all x equal");
}

// s^2 (J^T J)^-1 with s^2 = RSS / (n - k); zero when there are no spare
// degrees of freedom or the residuals vanish.
Eigen::VectorXd parameter_sigmas(const Eigen::MatrixXd& jacobian, double rss)
{
    const auto n = jacobian.rows();
    const auto k = jacobian.cols();
    const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (!lu.isInvertible()) throw FitError("fit: singular normal matrix, parameters not identifiable");
    const double s2 = n > k ? rss / static_cast<double>(n - k) : 0.0;
    const Eigen::MatrixXd cov = s2 * lu.inverse();
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

struct LinearSolution {
    Eigen::VectorXd beta;
    Eigen::VectorXd sigma;
    double residual_norm;
};

LinearSolution solve_linear(const Eigen::MatrixXd& design, const Eigen::VectorXd& y)
{
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) throw FitError("fit: rank-deficient design matrix");
    LinearSolution out;
    out.beta = qr.solve(y);
    const Eigen::VectorXd r = y - design * out.beta;
    out.residual_norm = r.norm();
    out.sigma = parameter_sigmas(design, r.squaredNorm());
    return out;
}

struct SqrtThresholdFunctor : Eigen::DenseFunctor<double> {
    const std::vector<DataPoint>* data;

    SqrtThresholdFunctor(const std::vector<DataPoint>& d)
        : Eigen::DenseFunctor<double>(2, static_cast<int>(d.size())), data(&d) {}

    int operator()(const InputType& p, ValueType& f) const
    {
        for (std::size_t i = 0; i < data->size(); ++i) {
            const auto& d = (*data)[i];
            f(static_cast<Eigen::Index>(i)) = p(0) * std::sqrt(std::max(d.x - p(1), 0.0)) - d.y;
        }
        return 0;
    }

    int df(const InputType& p, JacobianType& j) const
    {
        for (std::size_t i = 0; i < data->size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            const double u = (*data)[i].x - p(1);
            if (u > 0.0) {
                const double s = std::sqrt(u);
                j(row, 0) = s;
                j(row, 1) = -0.5 * p(0) / s;
            } else {
                j(row, 0) = 0.0;
                j(row, 1) = 0.0;
            }
        }
        return 0;
    }
};

} // namespace

FitResult fit_linear(std::span<const DataPoint> points)
{
    require_points(points, 3, "linear");
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = points[static_cast<std::size_t>(i)].x;
        design(i, 1) = 1.0;
        y(i) = points[static_cast<std::size_t>(i)].y;
    }
    const auto sol = solve_linear(design, y);
    FitResult r;
    r.model = FitModel::Linear;
    r.parameters = {{"a", sol.beta(0), sol.sigma(0)}, {"b", sol.beta(1), sol.sigma(1)}};
    r.residual_norm = sol.residual_norm;
    return r;
}

FitResult fit_power_law(std::span<const DataPoint> points)
{
    require_points(points, 3, "power_law");
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        if (!(p.x > 0.0) || !(p.y > 0.0)) {
            throw FitError("power_law fit needs x > 0 and y > 0 (point " + std::to_string(i) + ")");
        }
        design(i, 0) = 1.0;
        design(i, 1) = std::log(p.x);
        y(i) = std::log(p.y);
    }
    const auto sol = solve_linear(design, y);
    const double amplitude = std::exp(sol.beta(0));
    FitResult r;
    r.model = FitModel::PowerLaw;
    // sigma_A by first-order propagation through exp.
    r.parameters = {{"A", amplitude, amplitude * sol.sigma(0)}, {"p", sol.beta(1), sol.sigma(1)}};
    r.residual_norm = sol.residual_norm;
    return r;
}

FitResult fit_sqrt_threshold(std::span<const DataPoint> points)
{
    require_points(points, 4, "sqrt_threshold");
    // Work in units of the largest |x| and |y| so that tolerances mean the
    // same thing for depths in joule and in millikelvin.
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& d : points) {
        if (!(d.x > 0.0)) throw FitError("sqrt_threshold fit needs x > 0");
        sx = std::max(sx, d.x);
        sy = std::max(sy, std::abs(d.y));
    }
    if (sy == 0.0) sy = 1.0;
    std::vector<DataPoint> data;
    data.reserve(points.size());
    double x_min = 1.0;
    for (const auto& d : points) {
        data.push_back({d.x / sx, d.y / sy});
        x_min = std::min(x_min, d.x / sx);
    }

    Eigen::VectorXd p(2);
    p(1) = 0.5 * x_min;
    // Amplitude by linear least squares at the initial threshold.
    double num = 0.0;
    double den = 0.0;
    for (const auto& d : data) {
        num += d.y * std::sqrt(d.x - p(1));
        den += d.x - p(1);
    }
    p(0) = num / den;

    SqrtThresholdFunctor functor(data);
    Eigen::LevenbergMarquardt<SqrtThresholdFunctor> lm(functor);
    lm.setMaxfev(2000);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    const auto status = lm.minimize(p);

    using Eigen::LevenbergMarquardtSpace::Status;
    if (status == Status::TooManyFunctionEvaluation || status == Status::ImproperInputParameters ||
        !std::isfinite(p(0)) || !std::isfinite(p(1))) {
        throw FitError("sqrt_threshold fit did not converge (status " + std::to_string(static_cast<int>(status)) +
                       ", iterations " + std::to_string(lm.iterations()) + ", A = " +
                       std::to_string(p(0) * sy / std::sqrt(sx)) + ", x0 = " + std::to_string(p(1) * sx) + ")");
    }

    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::VectorXd f(n);
    Eigen::MatrixXd j(n, 2);
    functor(p, f);
    functor.df(p, j);
    const auto sigma = parameter_sigmas(j, f.squaredNorm());

    const double a_scale = sy / std::sqrt(sx);
    FitResult r;
    r.model = FitModel::SqrtThreshold;
    r.parameters = {{"A", p(0) * a_scale, sigma(0) * a_scale}, {"x0", p(1) * sx, sigma(1) * sx}};
    r.residual_norm = f.norm() * sy;
    r.iterations = static_cast<int>(lm.iterations());
    return r;
}

FitResult fit(std::span<const DataPoint> points, FitModel model)
{
    switch (model) {
    case FitModel::PowerLaw: return fit_power_law(points);
    case FitModel::SqrtThreshold: return fit_sqrt_threshold(points);
    case FitModel::Linear: return fit_linear(points);
    }
    throw FitError("unknown fit model");
}

double constant_residual_norm(std::span<const DataPoint> points)
{
    if (points.empty()) return 0.0;
    double mean = 0.0;
    for (const auto& p : points) mean += p.y;
    mean /= static_cast<double>(points.size());
    double ss = 0.0;
    for (const auto& p : points) ss += (p.y - mean) * (p.y - mean);
    return std::sqrt(ss);
}

} // namespace fiberguide
