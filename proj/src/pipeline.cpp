#include "agimetrics/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "agimetrics/errors.hpp"
#include "agimetrics/format.hpp"
#include "agimetrics/version.hpp"

namespace agimetrics::pipeline {

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const input_error& e) {
        throw input_error(std::string(name) + ": " + e.what());
    } catch (const numeric_error& e) {
        throw numeric_error(std::string(name) + ": " + e.what());
    }
}

std::pair<const char*, const char*> orientation_names(ingest::Orientation o) {
    // {x name, y name}
    if (o == ingest::Orientation::gdp_on_agi) {
        return {"the technology index", "real GDP"};
    }
    return {"real GDP", "the technology index"};
}

}  // namespace

RunReport run(const ingest::PipelineConfig& config) {
    RunReport report;
    report.config = config;
    report.orientation = config.orientation;

    const AlignedPanel panel =
        stage("ingest", [&] { return ingest::assemble(config); });
    report.panel_n = panel.size();
    report.first_year = panel.first_year();
    report.last_year = panel.last_year();

    stage("alpha", [&] {
        if (config.alpha) {
            report.alpha_used = *config.alpha;
        } else {
            const double est =
                model::elasticity_regression(panel).regression_estimate;
            if (!(est > 0.0) || !(est < 1.0)) {
                throw numeric_error("estimated alpha " + format_double(est) +
                                    " lies outside (0,1)");
            }
            report.alpha_used = est;
        }
        report.alpha_provenance =
            config.alpha_provenance.empty() ? "config" : config.alpha_provenance;
        return 0;
    });

    model::ModelParams params;
    params.alpha = report.alpha_used;
    params.inversion_mode = config.inversion_mode;
    params.residual_mode = config.residual_mode;

    report.index =
        stage("index", [&] { return model::compute_index(panel, params); });

    report.regression = stage("inference", [&] {
        const std::vector<double> ln_agi = log_transform(report.index.agi);
        const std::vector<double> ln_gdp = log_transform(panel.y());
        if (config.orientation == ingest::Orientation::gdp_on_agi) {
            return stats::infer(ln_agi, ln_gdp);
        }
        return stats::infer(ln_gdp, ln_agi);
    });

    const auto [x_name, y_name] = orientation_names(config.orientation);
    const double slope = report.regression.fit.slope;
    report.interpretation_direct =
        std::string("a 1% increase in ") + x_name + " is associated with a " +
        format_double(slope) + "% change in " + y_name + " (log-log slope b1 = " +
        format_double(slope) + ")";
    if (report.regression.perfect_fit) {
        report.interpretation_direct +=
            "; the fit is exact, p-value floored below 1e-15";
    }
    if (slope != 0.0) {
        report.interpretation_reciprocal =
            std::string("equivalently, a 1% change in ") + y_name +
            " corresponds to a " + format_double(1.0 / slope) + "% change in " +
            x_name + " (reciprocal slope 1/b1 = " + format_double(1.0 / slope) +
            ")";
    } else {
        report.interpretation_reciprocal =
            "reciprocal reading undefined: fitted slope is zero";
    }
    return report;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_to_json(const ingest::PipelineConfig& config) {
    ordered_json sources = ordered_json::array();
    for (const ingest::SourceSpec& s : config.sources) {
        ordered_json src;
        src["path"] = s.path;
        src["format"] = to_string(s.format);
        src["variable"] = to_string(s.variable);
        src["frequency"] = to_string(s.frequency);
        src["annualize"] = to_string(s.annualize);
        if (s.format == ingest::SourceFormat::generic_csv) {
            src["date_column"] = s.date_column;
            src["value_column"] = s.value_column;
        }
        src["unit"] = s.unit;
        sources.push_back(std::move(src));
    }
    ordered_json out;
    out["sources"] = std::move(sources);
    if (config.alpha) {
        out["alpha"] = *config.alpha;
    } else {
        out["alpha"] = "estimate";
    }
    out["inversion_mode"] = model::to_string(config.inversion_mode);
    out["residual_mode"] = model::to_string(config.residual_mode);
    out["regression_orientation"] = to_string(config.orientation);
    if (config.sample_window) {
        out["sample_window"] =
            ordered_json::array({config.sample_window->first,
                                 config.sample_window->second});
    } else {
        out["sample_window"] = nullptr;
    }
    out["output"] = {{"format", to_string(config.output_format)},
                     {"path", config.output_path}};
    return out;
}

ordered_json regression_to_json(const RunReport& report) {
    const stats::InferenceReport& reg = report.regression;
    ordered_json out;
    out["orientation"] = to_string(report.orientation);
    out["n"] = reg.fit.n;
    out["degrees_of_freedom"] = reg.degrees_of_freedom;
    out["slope"] = reg.fit.slope;
    out["intercept"] = reg.fit.intercept;
    out["x_mean"] = reg.fit.x_mean;
    out["y_mean"] = reg.fit.y_mean;
    out["sxx"] = reg.fit.sxx;
    out["pearson_r"] = reg.pearson_r;
    out["r_squared"] = reg.r_squared;
    if (reg.perfect_fit) {
        out["t_statistic"] = nullptr;  // +inf marker; see perfect_fit
    } else {
        out["t_statistic"] = reg.t_statistic;
    }
    out["p_value"] = reg.p_value;
    out["perfect_fit"] = reg.perfect_fit;
    out["residuals"] = reg.fit.residuals;
    return out;
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    ordered_json doc;
    doc["engine_version"] = kEngineVersion;
    doc["config"] = config_to_json(report.config);
    doc["panel"] = {{"n", report.panel_n},
                    {"first_year", report.first_year},
                    {"last_year", report.last_year}};
    doc["alpha"] = {{"value", report.alpha_used},
                    {"provenance", report.alpha_provenance}};
    doc["index"] = {{"years", report.index.years},
                    {"agi", report.index.agi},
                    {"tfp_residual", report.index.tfp_residual},
                    {"effective_labor", report.index.effective_labor}};
    doc["regression"] = regression_to_json(report);
    doc["interpretation"] = {{"direct", report.interpretation_direct},
                             {"reciprocal", report.interpretation_reciprocal}};
    return doc.dump(2) + "\n";
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string report_to_csv(const RunReport& report) {
    std::string out = "key,value\n";
    auto row = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += ',';
        out += csv_quote(value);
        out += '\n';
    };
    auto num = [&row](const std::string& key, double v) {
        row(key, format_double(v));
    };

    row("engine_version", kEngineVersion);
    const ingest::PipelineConfig& config = report.config;
    for (const ingest::SourceSpec& s : config.sources) {
        const std::string prefix = std::string("config.sources.") +
                                   ingest::to_string(s.variable);
        row(prefix + ".path", s.path);
        row(prefix + ".format", to_string(s.format));
        row(prefix + ".frequency", to_string(s.frequency));
        row(prefix + ".annualize", to_string(s.annualize));
        if (s.format == ingest::SourceFormat::generic_csv) {
            row(prefix + ".date_column", s.date_column);
            row(prefix + ".value_column", s.value_column);
        }
        if (!s.unit.empty()) row(prefix + ".unit", s.unit);
    }
    row("config.alpha", config.alpha ? format_double(*config.alpha) : "estimate");
    row("config.inversion_mode", model::to_string(config.inversion_mode));
    row("config.residual_mode", model::to_string(config.residual_mode));
    row("config.regression_orientation", to_string(config.orientation));
    if (config.sample_window) {
        row("config.sample_window.first",
            std::to_string(config.sample_window->first));
        row("config.sample_window.last",
            std::to_string(config.sample_window->second));
    }
    row("config.output.format", to_string(config.output_format));
    row("config.output.path", config.output_path);

    row("panel.n", std::to_string(report.panel_n));
    row("panel.first_year", std::to_string(report.first_year));
    row("panel.last_year", std::to_string(report.last_year));
    num("alpha.value", report.alpha_used);
    row("alpha.provenance", report.alpha_provenance);
    for (std::size_t i = 0; i < report.index.years.size(); ++i) {
        const std::string year = std::to_string(report.index.years[i]);
        num("index.agi." + year, report.index.agi[i]);
        num("index.tfp_residual." + year, report.index.tfp_residual[i]);
        num("index.effective_labor." + year, report.index.effective_labor[i]);
    }
    const stats::InferenceReport& reg = report.regression;
    row("regression.orientation", to_string(report.orientation));
    row("regression.n", std::to_string(reg.fit.n));
    row("regression.degrees_of_freedom", std::to_string(reg.degrees_of_freedom));
    num("regression.slope", reg.fit.slope);
    num("regression.intercept", reg.fit.intercept);
    num("regression.x_mean", reg.fit.x_mean);
    num("regression.y_mean", reg.fit.y_mean);
    num("regression.sxx", reg.fit.sxx);
    num("regression.pearson_r", reg.pearson_r);
    num("regression.r_squared", reg.r_squared);
    row("regression.t_statistic",
        reg.perfect_fit ? "perfect_fit" : format_double(reg.t_statistic));
    num("regression.p_value", reg.p_value);
    row("regression.perfect_fit", reg.perfect_fit ? "true" : "false");
    for (std::size_t i = 0; i < reg.fit.residuals.size(); ++i) {
        num("regression.residuals." + std::to_string(i), reg.fit.residuals[i]);
    }
    row("interpretation.direct", report.interpretation_direct);
    row("interpretation.reciprocal", report.interpretation_reciprocal);
    return out;
}

std::vector<std::pair<int, double>> project(const RunReport& report,
                                            double agi_growth_pct, int years) {
    if (years < 1) {
        throw input_error("years must be >= 1, got " + std::to_string(years));
    }
    if (report.orientation != ingest::Orientation::gdp_on_agi) {
        throw input_error(
            "no usable elasticity: report orientation is agi_on_gdp "
            "(rerun with regression_orientation gdp_on_agi)");
    }
    if (report.regression.perfect_fit) {
        throw input_error(
            "no usable elasticity: the fit is exact (perfect-fit annotation)");
    }
    const double slope = report.regression.fit.slope;
    if (!std::isfinite(slope)) {
        throw input_error("no usable elasticity: slope is not finite");
    }
    std::vector<std::pair<int, double>> rows;
    rows.reserve(static_cast<std::size_t>(years));
    for (int i = 1; i <= years; ++i) {
        rows.emplace_back(report.last_year + i, slope * agi_growth_pct);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// selfcheck
// ---------------------------------------------------------------------------

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo)));
}

struct SuiteOutcome {
    bool pass = true;
    std::string detail;

    void fail(std::string message) {
        if (pass) {
            pass = false;
            detail = std::move(message);
        }
    }
};

SuiteOutcome check_production_round_trips(int draws, std::uint64_t seed) {
    SuiteOutcome outcome;
    std::mt19937_64 rng(seed);
    double max_rel = 0.0;
    for (int i = 0; i < draws; ++i) {
        model::ModelParams params;
        params.alpha = 0.05 + 0.90 * uniform01(rng);
        const double a = log_uniform(rng, 1e-3, 1e3);
        const double k = log_uniform(rng, 1e-3, 1e3);
        const double l = log_uniform(rng, 1e-3, 1e3);
        const double agi = log_uniform(rng, 1e-3, 1e3);
        const double y = model::output(a, k, l, agi, params);
        const double agi_back = model::agi_index(y, a, k, l, params);
        const double a_back = model::tfp_residual(y, k, l, agi, params);
        max_rel = std::max(max_rel, std::fabs(agi_back - agi) / agi);
        max_rel = std::max(max_rel, std::fabs(a_back - a) / a);
    }
    if (max_rel > 1e-10) {
        outcome.fail("round-trip relative error " + format_double(max_rel) +
                     " exceeds 1e-10");
    }
    for (double l : {1.0, 50.0, 1e6}) {
        for (double agi : {0.0, 0.3, 1.0, 7.0}) {
            if (model::effective_labor(l, agi) != l) {
                outcome.fail("effective_labor(" + format_double(l) + ", " +
                             format_double(agi) + ") != l");
            }
        }
    }
    if (outcome.pass) {
        outcome.detail = std::to_string(draws) + " draws, max relative error " +
                         format_double(max_rel);
    }
    return outcome;
}

SuiteOutcome check_inference_oracles(double beta_symmetry_tol) {
    SuiteOutcome outcome;
    // Frozen two-sided t table values (0.05 critical points).
    const struct {
        double t;
        int df;
        double p;
    } table[] = {
        {2.228, 10, 0.05001177181711138},
        {12.706, 1, 0.05000080235813319},
        {2.042, 30, 0.05002867065619788},
    };
    for (const auto& row : table) {
        const double p = stats::p_value_two_sided(row.t, row.df);
        if (std::fabs(p - row.p) > 1e-12) {
            outcome.fail("p(t=" + format_double(row.t) +
                         ", df=" + std::to_string(row.df) + ") = " +
                         format_double(p) + ", expected " + format_double(row.p));
        }
    }
    // df = 1 closed form: p = 1 - (2/pi) * atan(t).
    for (double t = 0.0; t <= 50.0; t += 0.25) {
        const double closed = 1.0 - (2.0 / M_PI) * std::atan(t);
        if (std::fabs(stats::p_value_two_sided(t, 1) - closed) > 1e-10) {
            outcome.fail("df=1 Cauchy closed form mismatch at t = " +
                         format_double(t));
        }
    }
    if (stats::p_value_two_sided(0.0, 7) != 1.0) {
        outcome.fail("p(0, 7) is not exactly 1");
    }
    for (double x : {0.25, 0.5, 0.9}) {
        if (std::fabs(stats::regularized_incomplete_beta(x, 1.0, 1.0) - x) >
            1e-13) {
            outcome.fail("I_x(1,1) != x at x = " + format_double(x));
        }
    }
    if (std::fabs(stats::regularized_incomplete_beta(0.5, 2.0, 2.0) - 0.5) >
        1e-13) {
        outcome.fail("I_0.5(2,2) != 0.5");
    }
    const double shapes[] = {0.5, 1.0, 1.5, 2.5, 4.0, 8.0};
    for (double a : shapes) {
        for (double b : shapes) {
            for (int ix = 1; ix <= 9; ++ix) {
                const double x = ix / 10.0;
                const double residual =
                    stats::regularized_incomplete_beta(x, a, b) +
                    stats::regularized_incomplete_beta(1.0 - x, b, a) - 1.0;
                if (std::fabs(residual) > beta_symmetry_tol) {
                    outcome.fail("incomplete-beta symmetry residual " +
                                 format_double(std::fabs(residual)) +
                                 " exceeds tolerance " +
                                 format_double(beta_symmetry_tol) + " at (a=" +
                                 format_double(a) + ", b=" + format_double(b) +
                                 ", x=" + format_double(x) + ")");
                }
            }
        }
    }
    if (outcome.pass) {
        outcome.detail = "t-table, Cauchy df=1, incomplete-beta identities";
    }
    return outcome;
}

SuiteOutcome check_parse_round_trips() {
    SuiteOutcome outcome;
    const char* samples[] = {
        "DATE,ANNUAL\n2000-01-01,1.5\n2001-01-01,2.25\n2002-01-01,3.125\n",
        "DATE,QUARTERLY\n2020-01-01,1\n2020-04-01,2\n2020-07-01,3\n2020-10-01,4\n",
        "DATE,GAPPY\n2020-01-01,1.0\n2020-04-01,.\n2020-07-01,3.0\n2020-10-01,4.5\n",
        "DATE,MONTHLY\n2021-01-01,1\n2021-02-01,.\n2021-03-01,3\n2021-04-01,4\n",
    };
    for (const char* text : samples) {
        const Series parsed = ingest::parse_fred_csv(text);
        const Series reparsed = ingest::parse_fred_csv(ingest::serialize_fred_csv(parsed));
        if (!(parsed == reparsed)) {
            outcome.fail(std::string("serialize/parse round trip changed series '") +
                         parsed.name() + "'");
        }
    }
    if (outcome.pass) {
        outcome.detail = "fred_csv serialize/parse identity on 4 fixtures";
    }
    return outcome;
}

}  // namespace

bool selfcheck(std::ostream& os, const SelfcheckOptions& options) {
    const std::pair<const char*, SuiteOutcome> suites[] = {
        {"production round-trips",
         check_production_round_trips(options.round_trip_draws, options.seed)},
        {"inference oracles",
         check_inference_oracles(options.beta_symmetry_tol)},
        {"parse round-trips", check_parse_round_trips()},
    };
    int passed = 0;
    for (const auto& [name, outcome] : suites) {
        os << (outcome.pass ? "[PASS] " : "[FAIL] ") << name << ": "
           << outcome.detail << "\n";
        if (outcome.pass) ++passed;
    }
    os << "selfcheck: " << passed << "/" << std::size(suites)
       << " suites passed\n";
    return passed == static_cast<int>(std::size(suites));
}

// ---------------------------------------------------------------------------
// synthetic dataset writer
// ---------------------------------------------------------------------------

namespace {

double gaussian(std::mt19937_64& rng) {
    // Box-Muller; fully determined by the mt19937_64 stream.
    const double u1 = std::max(uniform01(rng), 1e-300);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw input_error("cannot write file '" + path.string() + "'");
    }
    out << content;
}

}  // namespace

std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const SynthOptions& options) {
    if (options.years < 4) {
        throw input_error("years must be >= 4, got " +
                          std::to_string(options.years));
    }
    model::ModelParams params;
    params.alpha = options.alpha;
    params.validate();

    std::mt19937_64 rng(options.seed);
    const double agi_growth = 1.0 + options.agi_growth_pct / 100.0;
    if (!(agi_growth > 0.0)) {
        throw input_error("agi growth must exceed -100%");
    }

    std::vector<Observation> gdp_q, capital, labor, tfp;
    for (int t = 0; t < options.years; ++t) {
        const int year = options.first_year + t;
        const double a = std::exp(options.noise_sigma * gaussian(rng));
        const double k = 8000.0 * std::pow(1.025, t);
        const double l = 150.0 * std::pow(1.008, t);
        const double agi = std::pow(agi_growth, t);
        const double y = model::output(a, k, l, agi, params);
        for (int q = 1; q <= 4; ++q) {
            gdp_q.push_back({Period{year, q}, y});
        }
        capital.push_back({Period{year, 0}, k});
        labor.push_back({Period{year, 0}, l});
        tfp.push_back({Period{year, 0}, a});
    }

    std::filesystem::create_directories(dir);
    write_file(dir / "gdp.csv",
               ingest::serialize_fred_csv(
                   Series("SYN_GDP", "", Frequency::quarterly, std::move(gdp_q))));
    write_file(dir / "capital.csv",
               ingest::serialize_fred_csv(
                   Series("SYN_CAPITAL", "", Frequency::annual, std::move(capital))));
    write_file(dir / "labor.csv",
               ingest::serialize_fred_csv(
                   Series("SYN_LABOR", "", Frequency::annual, std::move(labor))));
    write_file(dir / "tfp.csv",
               ingest::serialize_fred_csv(
                   Series("SYN_TFP", "", Frequency::annual, std::move(tfp))));

    ordered_json config;
    config["sources"] = ordered_json::array(
        {{{"path", "gdp.csv"},
          {"format", "fred_csv"},
          {"variable", "gdp"},
          {"frequency", "quarterly"},
          {"annualize", "mean"}},
         {{"path", "capital.csv"},
          {"format", "fred_csv"},
          {"variable", "capital"},
          {"frequency", "annual"}},
         {{"path", "labor.csv"},
          {"format", "fred_csv"},
          {"variable", "labor"},
          {"frequency", "annual"}},
         {{"path", "tfp.csv"},
          {"format", "fred_csv"},
          {"variable", "tfp"},
          {"frequency", "annual"}}});
    config["alpha"] = options.alpha;
    config["regression_orientation"] = "gdp_on_agi";
    config["output"] = {{"format", "json"}, {"path", ""}};

    const std::filesystem::path config_path = dir / "config.json";
    write_file(config_path, config.dump(2) + "\n");
    return config_path;
}

}  // namespace agimetrics::pipeline
