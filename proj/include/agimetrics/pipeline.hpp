#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "agimetrics/inference.hpp"
#include "agimetrics/ingest.hpp"
#include "agimetrics/production.hpp"

namespace agimetrics::pipeline {

struct RunReport {
    ingest::PipelineConfig config;  // resolved configuration echo
    std::size_t panel_n = 0;
    int first_year = 0;
    int last_year = 0;
    double alpha_used = 0.0;
    std::string alpha_provenance;
    model::IndexResult index;
    ingest::Orientation orientation = ingest::Orientation::gdp_on_agi;
    stats::InferenceReport regression;
    std::string interpretation_direct;
    std::string interpretation_reciprocal;
};

// Full pipeline: assemble the panel, resolve alpha, compute the index,
// natural-log index and GDP, and fit the configured regression. Stage
// failures carry the stage name plus source/year context.
RunReport run(const ingest::PipelineConfig& config);

// Fixed-field-order JSON rendering; byte-stable for identical inputs.
std::string report_to_json(const RunReport& report);

// Flat key,value rendering of the same content.
std::string report_to_csv(const RunReport& report);

// In-sample elasticity extrapolation: projected GDP growth per year under a
// constant index growth rate, from the fitted log-log slope. Requires a
// gdp_on_agi report with a usable (non-perfect-fit) slope.
std::vector<std::pair<int, double>> project(const RunReport& report,
                                            double agi_growth_pct, int years);

struct SelfcheckOptions {
    int round_trip_draws = 200;
    std::uint64_t seed = 20240117;
    double beta_symmetry_tol = 1e-12;  // corruptible negative-control knob
};

// Runs the synthetic round-trip, inference-oracle and parse round-trip
// suites, printing one line per suite. Returns true when all pass.
bool selfcheck(std::ostream& os, const SelfcheckOptions& options = {});

struct SynthOptions {
    int years = 20;
    int first_year = 2000;
    double alpha = 0.5;
    double agi_growth_pct = 3.0;
    double noise_sigma = 0.02;  // lognormal noise on the TFP path
    std::uint64_t seed = 42;
};

// Writes a synthetic four-file dataset (fred_csv) plus a ready-to-run
// config.json into dir. Returns the config path.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const SynthOptions& options);

}  // namespace agimetrics::pipeline
