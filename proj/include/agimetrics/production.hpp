#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agimetrics/timeseries.hpp"

namespace agimetrics::model {

// The index inversion and the TFP residual each exist in two algebraic
// readings: `consistent` is the exact inversion of the production function,
// `paper_literal` keeps the typeset grouping (exponent on the denominator
// only; residual as the reciprocal with L outside the exponent). The two
// agree only at degenerate points, so callers pick one explicitly.
enum class InversionMode { consistent, paper_literal };
enum class ResidualMode { consistent, paper_literal };

const char* to_string(InversionMode m);
const char* to_string(ResidualMode m);

struct ModelParams {
    double alpha = 0.33;  // output elasticity of capital, strictly in (0, 1)
    InversionMode inversion_mode = InversionMode::consistent;
    ResidualMode residual_mode = ResidualMode::consistent;

    void validate() const;
};

struct IndexResult {
    std::vector<int> years;
    std::vector<double> agi;              // technology-level index per year
    std::vector<double> tfp_residual;     // TFP recomputed from the index
    std::vector<double> effective_labor;  // combined labor measure per year
    ModelParams params;
    std::pair<int, int> source_window{0, 0};
};

struct ElasticityEstimate {
    // Per-year output-%-change over capital-%-change ratios; years whose
    // capital percent change is zero are omitted.
    std::vector<std::pair<int, double>> pointwise;
    double regression_estimate = 0.0;  // OLS slope of dln(Y) on dln(K)
    std::string method_note;
};

// Cobb-Douglas output: a * k^alpha * (l*agi)^(1-alpha).
double output(double a, double k, double l, double agi,
              const ModelParams& params);

// Technology-level index implied by observed output. In consistent mode
// this is the exact inverse of output() in agi.
double agi_index(double y, double a, double k, double l,
                 const ModelParams& params);

// TFP residual implied by observed output and the index.
double tfp_residual(double y, double k, double l, double agi,
                    const ModelParams& params);

// l*agi + (1-agi)*l, exactly as written. Algebraically the identity E = L
// for every agi; kept in that form deliberately.
double effective_labor(double l, double agi);

// Elementwise y_pct/k_pct; positions where k_pct is zero are nullopt.
std::vector<std::optional<double>> elasticity_pointwise(
    std::span<const double> y_pct, std::span<const double> k_pct);

// Estimates the capital elasticity from a panel two ways: the pointwise
// percent-change ratios and an OLS slope of log differences.
ElasticityEstimate elasticity_regression(const AlignedPanel& panel);

// Applies the index inversion per panel year, then recomputes the residual
// and the effective-labor measure from the result.
IndexResult compute_index(const AlignedPanel& panel, const ModelParams& params);

// Builds a panel whose output column satisfies the production function
// exactly for the given paths. Ground truth for round-trip checks.
AlignedPanel synthesize_panel(const std::vector<int>& years,
                              const std::vector<double>& a_path,
                              const std::vector<double>& k_path,
                              const std::vector<double>& l_path,
                              const std::vector<double>& agi_path,
                              const ModelParams& params);

}  // namespace agimetrics::model
