#include "agimetrics/production.hpp"

#include <cmath>
#include <string>

#include "agimetrics/errors.hpp"
#include "agimetrics/inference.hpp"

namespace agimetrics::model {

const char* to_string(InversionMode m) {
    return m == InversionMode::consistent ? "consistent" : "paper_literal";
}

const char* to_string(ResidualMode m) {
    return m == ResidualMode::consistent ? "consistent" : "paper_literal";
}

void ModelParams::validate() const {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw numeric_error("alpha must lie strictly in (0, 1), got " +
                            std::to_string(alpha));
    }
}

namespace {

void require_positive(double v, const char* arg) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw numeric_error(std::string(arg) + " must be positive and finite, got " +
                            std::to_string(v));
    }
}

}  // namespace

double output(double a, double k, double l, double agi,
              const ModelParams& params) {
    params.validate();
    require_positive(a, "a");
    require_positive(k, "k");
    require_positive(l, "l");
    require_positive(agi, "agi");
    const double alpha = params.alpha;
    const double y = a * std::pow(k, alpha) * std::pow(l * agi, 1.0 - alpha);
    if (!std::isfinite(y) || y <= 0.0) {
        throw numeric_error("output overflowed to a non-finite value");
    }
    return y;
}

double agi_index(double y, double a, double k, double l,
                 const ModelParams& params) {
    params.validate();
    require_positive(y, "y");
    require_positive(a, "a");
    require_positive(k, "k");
    require_positive(l, "l");
    const double alpha = params.alpha;
    const double denom =
        a * std::pow(k, alpha) * std::pow(l, 1.0 - alpha);
    double agi = 0.0;
    switch (params.inversion_mode) {
        case InversionMode::consistent:
            agi = std::pow(y / denom, 1.0 / (1.0 - alpha));
            break;
        case InversionMode::paper_literal:
            agi = y / std::pow(denom, 1.0 / (1.0 - alpha));
            break;
    }
    if (!std::isfinite(agi) || agi <= 0.0) {
        throw numeric_error("agi_index overflowed to a non-finite value");
    }
    return agi;
}

double tfp_residual(double y, double k, double l, double agi,
                    const ModelParams& params) {
    params.validate();
    require_positive(y, "y");
    require_positive(k, "k");
    require_positive(l, "l");
    require_positive(agi, "agi");
    const double alpha = params.alpha;
    double a = 0.0;
    switch (params.residual_mode) {
        case ResidualMode::consistent:
            a = y / (std::pow(k, alpha) * std::pow(l * agi, 1.0 - alpha));
            break;
        case ResidualMode::paper_literal:
            a = std::pow(k, alpha) * l * std::pow(agi, 1.0 - alpha) / y;
            break;
    }
    if (!std::isfinite(a) || a <= 0.0) {
        throw numeric_error("tfp_residual overflowed to a non-finite value");
    }
    return a;
}

double effective_labor(double l, double agi) {
    require_positive(l, "l");
    return l * agi + (1.0 - agi) * l;
}

std::vector<std::optional<double>> elasticity_pointwise(
    std::span<const double> y_pct, std::span<const double> k_pct) {
    if (y_pct.size() != k_pct.size()) {
        throw input_error("length mismatch: y_pct has " +
                          std::to_string(y_pct.size()) + ", k_pct has " +
                          std::to_string(k_pct.size()));
    }
    std::vector<std::optional<double>> out;
    out.reserve(y_pct.size());
    for (std::size_t i = 0; i < y_pct.size(); ++i) {
        if (k_pct[i] == 0.0) {
            out.push_back(std::nullopt);
        } else {
            out.push_back(y_pct[i] / k_pct[i]);
        }
    }
    return out;
}

namespace {

std::vector<double> percent_changes(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size() - 1);
    for (std::size_t i = 1; i < v.size(); ++i) {
        out.push_back(100.0 * (v[i] - v[i - 1]) / v[i - 1]);
    }
    return out;
}

std::vector<double> log_differences(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size() - 1);
    for (std::size_t i = 1; i < v.size(); ++i) {
        out.push_back(std::log(v[i]) - std::log(v[i - 1]));
    }
    return out;
}

}  // namespace

ElasticityEstimate elasticity_regression(const AlignedPanel& panel) {
    if (panel.size() < 4) {
        throw input_error("sample too short for elasticity regression: " +
                          std::to_string(panel.size()) +
                          " years (minimum 4, so the differenced sample has 3)");
    }
    const std::vector<double> dlnk = log_differences(panel.k());
    const std::vector<double> dlny = log_differences(panel.y());

    double dlnk_mean = 0.0;
    for (double v : dlnk) dlnk_mean += v;
    dlnk_mean /= static_cast<double>(dlnk.size());
    double variance = 0.0;
    for (double v : dlnk) variance += (v - dlnk_mean) * (v - dlnk_mean);
    if (variance == 0.0) {
        throw numeric_error("zero variance in capital log-differences");
    }

    ElasticityEstimate est;
    est.regression_estimate = stats::ols_fit(dlnk, dlny).slope;
    est.method_note =
        "OLS slope of year-over-year log differences (dln Y on dln K); "
        "pointwise column is the raw percent-change ratio per year";

    const std::vector<double> y_pct = percent_changes(panel.y());
    const std::vector<double> k_pct = percent_changes(panel.k());
    const auto ratios = elasticity_pointwise(y_pct, k_pct);
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i].has_value()) {
            est.pointwise.emplace_back(panel.years()[i + 1], *ratios[i]);
        }
    }
    return est;
}

IndexResult compute_index(const AlignedPanel& panel, const ModelParams& params) {
    params.validate();
    IndexResult result;
    result.years = panel.years();
    result.params = params;
    result.source_window = {panel.first_year(), panel.last_year()};
    result.agi.reserve(panel.size());
    result.tfp_residual.reserve(panel.size());
    result.effective_labor.reserve(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        try {
            const double agi = agi_index(panel.y()[i], panel.a()[i],
                                         panel.k()[i], panel.l()[i], params);
            result.agi.push_back(agi);
            result.tfp_residual.push_back(
                tfp_residual(panel.y()[i], panel.k()[i], panel.l()[i], agi,
                             params));
            result.effective_labor.push_back(
                effective_labor(panel.l()[i], agi));
        } catch (const numeric_error& e) {
            throw numeric_error("year " + std::to_string(panel.years()[i]) +
                                ": " + e.what());
        }
    }
    return result;
}

AlignedPanel synthesize_panel(const std::vector<int>& years,
                              const std::vector<double>& a_path,
                              const std::vector<double>& k_path,
                              const std::vector<double>& l_path,
                              const std::vector<double>& agi_path,
                              const ModelParams& params) {
    const std::size_t n = years.size();
    if (a_path.size() != n || k_path.size() != n || l_path.size() != n ||
        agi_path.size() != n) {
        throw input_error("mismatched path lengths");
    }
    std::vector<double> y;
    y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        y.push_back(output(a_path[i], k_path[i], l_path[i], agi_path[i], params));
    }
    return AlignedPanel(years, y, k_path, l_path, a_path);
}

}  // namespace agimetrics::model
