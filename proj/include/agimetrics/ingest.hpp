#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agimetrics/production.hpp"
#include "agimetrics/timeseries.hpp"

namespace agimetrics::ingest {

enum class SourceFormat { fred_csv, generic_csv };
enum class Variable { gdp, capital, labor, tfp };
enum class Orientation { gdp_on_agi, agi_on_gdp };
enum class ReportFormat { json, csv };

const char* to_string(SourceFormat f);
const char* to_string(Variable v);
const char* to_string(Orientation o);
const char* to_string(ReportFormat f);

// One input file mapped to a model variable. generic_csv requires the two
// column names; fred_csv forbids them (its layout is fixed).
struct SourceSpec {
    std::string path;
    SourceFormat format = SourceFormat::fred_csv;
    Variable variable = Variable::gdp;
    Frequency frequency = Frequency::annual;  // declared, checked against the file
    AnnualizeMethod annualize = AnnualizeMethod::mean;
    std::string date_column;
    std::string value_column;
    std::string unit;
};

struct PipelineConfig {
    std::vector<SourceSpec> sources;  // exactly four, one per variable
    std::optional<double> alpha;      // nullopt means estimate from the panel
    std::string alpha_provenance;
    model::InversionMode inversion_mode = model::InversionMode::consistent;
    model::ResidualMode residual_mode = model::ResidualMode::consistent;
    Orientation orientation = Orientation::gdp_on_agi;
    std::optional<std::pair<int, int>> sample_window;
    ReportFormat output_format = ReportFormat::json;
    std::string output_path;             // empty means standard output
    std::filesystem::path base_dir;      // resolution root for relative source paths
};

// FRED export format: header "DATE,<SERIES_ID>", rows "YYYY-MM-DD,<value|.>".
// "." rows are missing data: their dates still drive frequency inference,
// but they contribute no observation.
Series parse_fred_csv(const std::string& text);

// Inverse of parse_fred_csv. Interior gaps are written back as "." rows so
// a serialized series always re-parses to an identical one.
std::string serialize_fred_csv(const Series& s);

// Two named columns out of an RFC-4180 CSV. Dates are YYYY-MM-DD, or bare
// YYYY which implies annual frequency. Empty value cells are skipped.
Series parse_generic_csv(const std::string& text, const std::string& date_column,
                         const std::string& value_column);

// Parses and validates a config document; schema errors name the JSON path
// of the offending field. base_dir anchors relative source paths.
PipelineConfig load_config(const std::string& json_text,
                           const std::filesystem::path& base_dir = ".");
PipelineConfig load_config_file(const std::filesystem::path& path);

const SourceSpec& source_for(const PipelineConfig& config, Variable v);

// Reads all four sources, annualizes and window-clips as configured, and
// joins them into a panel. Errors carry the source path.
AlignedPanel assemble(const PipelineConfig& config);

}  // namespace agimetrics::ingest
