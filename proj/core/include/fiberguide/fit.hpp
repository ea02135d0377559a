#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fiberguide {

enum class FitModel { PowerLaw, SqrtThreshold, Linear };

std::string_view to_string(FitModel model) noexcept;
/// Accepts "power", "power_law", "sqrt-threshold", "sqrt_threshold", "linear".
FitModel fit_model_from_string(std::string_view text);

struct DataPoint {
    double x = 0.0;
    double y = 0.0;
};

struct FitParameter {
    std::string name;
    double value = 0.0;
    double sigma = 0.0; // 1 sigma
};

struct FitResult {
    FitModel model = FitModel::Linear;
    /// power_law: A, p.  sqrt_threshold: A, x0.  linear: a, b.
    std::vector<FitParameter> parameters;
    /// Euclidean norm of the residuals in the space the fit minimises
    /// (log-log for power_law, data space otherwise).
    double residual_norm = 0.0;
    int iterations = 0;

    const FitParameter& parameter(std::string_view name) const;
    double value(std::string_view name) const { return parameter(name).value; }
    double sigma(std::string_view name) const { return parameter(name).sigma; }
    double evaluate(double x) const;
};

/// Dispatches to one of the model-specific fits below.
FitResult fit(std::span<const DataPoint> points, FitModel model);

/// y = A x^p, least squares on (log x, log y). Needs >= 3 points, x, y > 0.
FitResult fit_power_law(std::span<const DataPoint> points);

/// y = A sqrt(max(x - x0, 0)), Levenberg-Marquardt from x0 = min(x)/2.
/// Needs >= 4 points with x > 0.
FitResult fit_sqrt_threshold(std::span<const DataPoint> points);

/// y = a x + b. Needs >= 3 points.
FitResult fit_linear(std::span<const DataPoint> points);

/// Residual norm of the best constant model (the mean).
double constant_residual_norm(std::span<const DataPoint> points);

} // namespace fiberguide
