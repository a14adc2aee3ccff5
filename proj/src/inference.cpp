#include "agimetrics/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "agimetrics/errors.hpp"

namespace agimetrics::stats {

namespace {

constexpr double kPerfectFitRelativeRss = 1e-24;

struct CenteredSums {
    double x_mean = 0.0;
    double y_mean = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
};

CenteredSums centered_sums(std::span<const double> x,
                           std::span<const double> y) {
    const std::size_t n = x.size();
    CenteredSums s;
    for (std::size_t i = 0; i < n; ++i) {
        s.x_mean += x[i];
        s.y_mean += y[i];
    }
    s.x_mean /= static_cast<double>(n);
    s.y_mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - s.x_mean;
        const double dy = y[i] - s.y_mean;
        s.sxx += dx * dx;
        s.syy += dy * dy;
        s.sxy += dx * dy;
    }
    return s;
}

void require_same_length(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw input_error("length mismatch: x has " + std::to_string(x.size()) +
                          ", y has " + std::to_string(y.size()));
    }
}

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIterations = 500;
    constexpr double kFloor = 1e-300;
    const double eps = std::numeric_limits<double>::epsilon();

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFloor) d = kFloor;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFloor) d = kFloor;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFloor) c = kFloor;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFloor) d = kFloor;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFloor) c = kFloor;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw numeric_error("incomplete beta continued fraction failed to converge"
                        " (a=" + std::to_string(a) + ", b=" + std::to_string(b) +
                        ", x=" + std::to_string(x) + ")");
}

}  // namespace

RegressionFit ols_fit(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    const std::size_t n = x.size();
    if (n < 3) {
        throw input_error("sample too short: n=" + std::to_string(n) +
                          " (minimum 3)");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw numeric_error("non-finite value at index " + std::to_string(i));
        }
    }
    const CenteredSums s = centered_sums(x, y);
    if (s.sxx == 0.0) {
        throw numeric_error("degenerate regressor (zero variance in x)");
    }

    RegressionFit fit;
    fit.slope = s.sxy / s.sxx;
    fit.intercept = s.y_mean - fit.slope * s.x_mean;
    fit.x_mean = s.x_mean;
    fit.y_mean = s.y_mean;
    fit.sxx = s.sxx;
    fit.n = n;
    fit.residuals.reserve(n);
    double residual_sum = 0.0;
    double residual_dot_x = 0.0;
    double max_abs_y = 0.0;
    double max_abs_x = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.residuals.push_back(r);
        residual_sum += r;
        residual_dot_x += r * x[i];
        max_abs_y = std::max(max_abs_y, std::fabs(y[i]));
        max_abs_x = std::max(max_abs_x, std::fabs(x[i]));
    }
    // Normal-equation identities; a violation means the fit itself is broken.
    const double tol = 1e-9 * static_cast<double>(n) * std::max(max_abs_y, 1e-300);
    if (std::fabs(residual_sum) > tol ||
        std::fabs(residual_dot_x) > tol * max_abs_x) {
        throw numeric_error("internal: OLS normal equations violated");
    }
    return fit;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    if (x.size() < 2) {
        throw input_error("sample too short: n=" + std::to_string(x.size()) +
                          " (minimum 2)");
    }
    const CenteredSums s = centered_sums(x, y);
    if (s.sxx == 0.0) throw numeric_error("zero variance in x");
    if (s.syy == 0.0) throw numeric_error("zero variance in y");
    double r = s.sxy / std::sqrt(s.sxx * s.syy);
    if (r > 1.0) {
        if (r > 1.0 + 1e-12) throw numeric_error("correlation out of range");
        r = 1.0;
    } else if (r < -1.0) {
        if (r < -1.0 - 1e-12) throw numeric_error("correlation out of range");
        r = -1.0;
    }
    return r;
}

double r_squared(std::span<const double> x, std::span<const double> y) {
    const double r = pearson(x, y);
    return r * r;
}

double t_statistic(const RegressionFit& fit) {
    if (fit.n < 3) {
        throw input_error("fit sample too short: n=" + std::to_string(fit.n));
    }
    double rss = 0.0;
    for (double r : fit.residuals) rss += r * r;
    const double ess = fit.slope * fit.slope * fit.sxx;
    const double syy = ess + rss;
    if (rss <= kPerfectFitRelativeRss * syy) {
        if (fit.slope == 0.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    const double se =
        std::sqrt((rss / static_cast<double>(fit.n - 2)) / fit.sxx);
    return fit.slope / se;
}

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw numeric_error("incomplete beta requires a > 0 and b > 0");
    }
    if (!(x >= 0.0) || !(x <= 1.0)) {
        throw numeric_error("incomplete beta requires x in [0, 1], got " +
                            std::to_string(x));
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double log_prefactor = std::lgamma(a + b) - std::lgamma(a) -
                                 std::lgamma(b) + a * std::log(x) +
                                 b * std::log1p(-x);
    const double prefactor = std::exp(log_prefactor);
    // Evaluate the continued fraction on whichever tail converges fast.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return prefactor * betacf(a, b, x) / a;
    }
    return 1.0 - prefactor * betacf(b, a, 1.0 - x) / b;
}

double p_value_two_sided(double t, int df) {
    if (df < 1) {
        throw input_error("degrees of freedom must be >= 1, got " +
                          std::to_string(df));
    }
    if (std::isnan(t)) throw numeric_error("t-statistic is NaN");
    if (t == 0.0) return 1.0;
    if (std::isinf(t)) {
        // Perfect-fit marker: the p-value floors at the smallest positive
        // representable double rather than reporting an exact zero.
        return std::numeric_limits<double>::denorm_min();
    }
    const double dfd = static_cast<double>(df);
    const double w = dfd / (dfd + t * t);
    double p = regularized_incomplete_beta(w, dfd / 2.0, 0.5);
    if (p <= 0.0) return std::numeric_limits<double>::denorm_min();
    return std::min(p, 1.0);
}

InferenceReport infer(std::span<const double> x, std::span<const double> y) {
    InferenceReport report;
    report.fit = ols_fit(x, y);
    report.pearson_r = pearson(x, y);
    report.r_squared = report.pearson_r * report.pearson_r;
    report.t_statistic = t_statistic(report.fit);
    report.perfect_fit = std::isinf(report.t_statistic);
    report.degrees_of_freedom = report.fit.n - 2;
    report.p_value = p_value_two_sided(report.t_statistic,
                                       static_cast<int>(report.degrees_of_freedom));
    return report;
}

}  // namespace agimetrics::stats
