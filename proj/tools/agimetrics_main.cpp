#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "agimetrics/errors.hpp"
#include "agimetrics/format.hpp"
#include "agimetrics/pipeline.hpp"
#include "agimetrics/version.hpp"

namespace {

using namespace agimetrics;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNumericError = 2;
constexpr int kExitSelfcheckFailed = 3;

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw input_error("cannot write output file '" + path + "'");
    }
    out << text;
}

int do_run(const std::string& config_path, const std::string& output_override,
           bool quiet) {
    ingest::PipelineConfig config = ingest::load_config_file(config_path);
    if (output_override == "json") config.output_format = ingest::ReportFormat::json;
    if (output_override == "csv") config.output_format = ingest::ReportFormat::csv;

    const pipeline::RunReport report = pipeline::run(config);
    if (!quiet) {
        std::cerr << "panel: " << report.panel_n << " years ("
                  << report.first_year << "-" << report.last_year << ")\n"
                  << "alpha: " << format_double(report.alpha_used) << " ["
                  << report.alpha_provenance << "]\n"
                  << "slope b1 = " << format_double(report.regression.fit.slope)
                  << ", r = " << format_double(report.regression.pearson_r)
                  << ", R^2 = " << format_double(report.regression.r_squared)
                  << ", p = " << format_double(report.regression.p_value)
                  << (report.regression.perfect_fit ? " (perfect fit)" : "")
                  << "\n";
    }
    const std::string text = config.output_format == ingest::ReportFormat::json
                                 ? pipeline::report_to_json(report)
                                 : pipeline::report_to_csv(report);
    write_output(text, config.output_path);
    return kExitOk;
}

int do_project(const std::string& config_path, double agi_growth, int years,
               const std::string& format, bool quiet) {
    const ingest::PipelineConfig config = ingest::load_config_file(config_path);
    const pipeline::RunReport report = pipeline::run(config);
    const auto rows = pipeline::project(report, agi_growth, years);
    if (!quiet) {
        std::cerr << "projection from fitted slope "
                  << format_double(report.regression.fit.slope)
                  << " under " << format_double(agi_growth)
                  << "%/yr index growth (in-sample elasticity extrapolation)\n";
    }
    if (format == "csv") {
        std::cout << "year,projected_gdp_growth_pct\n";
        for (const auto& [year, growth] : rows) {
            std::cout << year << "," << format_double(growth) << "\n";
        }
    } else {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const auto& [year, growth] : rows) {
            doc.push_back({{"year", year}, {"projected_gdp_growth_pct", growth}});
        }
        std::cout << doc.dump(2) << "\n";
    }
    return kExitOk;
}

int do_synth(const std::string& out_dir, const pipeline::SynthOptions& options,
             bool quiet) {
    const auto config_path = pipeline::write_synthetic_dataset(out_dir, options);
    if (!quiet) {
        std::cerr << "wrote synthetic dataset to " << out_dir << "\n";
    }
    std::cout << config_path.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Production-function technology index and GDP regression pipeline"};
    app.set_version_flag("--version", agimetrics::kEngineVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::string project_format = "json";
    bool quiet = false;
    double agi_growth = 0.0;
    int years = 1;
    std::string out_dir;
    pipeline::SynthOptions synth_options;

    CLI::App* run_cmd = app.add_subcommand(
        "run", "Assemble data, compute the index, fit the regression");
    run_cmd->add_option("--config", config_path, "pipeline config JSON")
        ->required();
    run_cmd->add_option("--output", output_override, "report format override")
        ->check(CLI::IsMember({"json", "csv"}));
    run_cmd->add_flag("--quiet", quiet, "suppress progress notes");

    CLI::App* selfcheck_cmd = app.add_subcommand(
        "selfcheck", "Run the built-in verification suites");
    selfcheck_cmd->add_flag("--quiet", quiet, "suppress progress notes");

    CLI::App* project_cmd = app.add_subcommand(
        "project", "Extrapolate GDP growth from the fitted elasticity");
    project_cmd->add_option("--config", config_path, "pipeline config JSON")
        ->required();
    project_cmd->add_option("--agi-growth", agi_growth,
                            "assumed index growth, percent per year")
        ->required();
    project_cmd->add_option("--years", years, "number of projected years")
        ->required();
    project_cmd->add_option("--output", project_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    project_cmd->add_flag("--quiet", quiet, "suppress progress notes");

    CLI::App* synth_cmd = app.add_subcommand(
        "synth", "Write a synthetic four-file demo dataset");
    synth_cmd->add_option("--out-dir", out_dir, "target directory")->required();
    synth_cmd->add_option("--years", synth_options.years, "panel length");
    synth_cmd->add_option("--first-year", synth_options.first_year, "first year");
    synth_cmd->add_option("--alpha", synth_options.alpha,
                          "output elasticity of capital");
    synth_cmd->add_option("--agi-growth", synth_options.agi_growth_pct,
                          "index growth, percent per year");
    synth_cmd->add_option("--noise", synth_options.noise_sigma,
                          "lognormal TFP noise sigma");
    synth_cmd->add_option("--seed", synth_options.seed, "RNG seed");
    synth_cmd->add_flag("--quiet", quiet, "suppress progress notes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return do_run(config_path, output_override, quiet);
        }
        if (selfcheck_cmd->parsed()) {
            return pipeline::selfcheck(std::cout) ? kExitOk : kExitSelfcheckFailed;
        }
        if (project_cmd->parsed()) {
            return do_project(config_path, agi_growth, years, project_format,
                              quiet);
        }
        if (synth_cmd->parsed()) {
            return do_synth(out_dir, synth_options, quiet);
        }
    } catch (const agimetrics::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
