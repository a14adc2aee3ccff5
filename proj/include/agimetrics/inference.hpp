#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace agimetrics::stats {

struct RegressionFit {
    double slope = 0.0;      // b1
    double intercept = 0.0;  // b0 = y_mean - b1 * x_mean
    double x_mean = 0.0;
    double y_mean = 0.0;
    std::vector<double> residuals;
    double sxx = 0.0;  // sum of squared x deviations
    std::size_t n = 0;
};

struct InferenceReport {
    RegressionFit fit;
    double pearson_r = 0.0;
    double r_squared = 0.0;
    double t_statistic = 0.0;  // +inf marks a perfect fit
    double p_value = 1.0;
    std::size_t degrees_of_freedom = 0;  // n - 2
    bool perfect_fit = false;
};

// Simple OLS by two-pass mean-centered sums. Requires n >= 3 and a
// regressor with nonzero variance.
RegressionFit ols_fit(std::span<const double> x, std::span<const double> y);

// Pearson correlation; clamped to [-1, 1] against last-ulp overshoot only.
double pearson(std::span<const double> x, std::span<const double> y);

// Square of the Pearson correlation (the simple-regression identity).
double r_squared(std::span<const double> x, std::span<const double> y);

// t = slope / se with se = sqrt((rss/(n-2))/sxx). Residuals that vanish
// relative to the data (rss <= 1e-24 * syy) mark a perfect fit and yield
// +inf (0 when the slope is also zero).
double t_statistic(const RegressionFit& fit);

// Regularized incomplete beta I_x(a,b) by continued fraction with the
// standard symmetry switch; absolute error <= 1e-12. Non-convergence is an
// error, never a silent wrong answer.
double regularized_incomplete_beta(double x, double a, double b);

// Two-sided Student-t p-value: 2*P(T > |t|) = I_w(df/2, 1/2) with
// w = df/(df + t^2). Exactly 1 at t = 0; a perfect-fit +inf t maps to the
// smallest positive double.
double p_value_two_sided(double t, int df);

// Full bundle: fit, correlation, determination, t and p with df = n - 2.
InferenceReport infer(std::span<const double> x, std::span<const double> y);

}  // namespace agimetrics::stats
