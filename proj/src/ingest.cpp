#include "agimetrics/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string_view>
#include <tuple>

#include <json.hpp>

#include "agimetrics/errors.hpp"
#include "agimetrics/format.hpp"

namespace agimetrics::ingest {

const char* to_string(SourceFormat f) {
    return f == SourceFormat::fred_csv ? "fred_csv" : "generic_csv";
}

const char* to_string(Variable v) {
    switch (v) {
        case Variable::gdp: return "gdp";
        case Variable::capital: return "capital";
        case Variable::labor: return "labor";
        case Variable::tfp: return "tfp";
    }
    return "?";
}

const char* to_string(Orientation o) {
    return o == Orientation::gdp_on_agi ? "gdp_on_agi" : "agi_on_gdp";
}

const char* to_string(ReportFormat f) {
    return f == ReportFormat::json ? "json" : "csv";
}

namespace {

struct Date {
    int year = 0;
    int month = 0;  // 0 for bare-year dates
    int day = 0;
};

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

int to_int(std::string_view s) {
    int v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

// Strict YYYY-MM-DD; returns false on any malformation.
bool parse_full_date(std::string_view s, Date& out) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    const auto y = s.substr(0, 4), m = s.substr(5, 2), d = s.substr(8, 2);
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return false;
    out = {to_int(y), to_int(m), to_int(d)};
    return out.month >= 1 && out.month <= 12 && out.day >= 1 && out.day <= 31;
}

bool parse_value(std::string_view s, double& out) {
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() &&
           std::isfinite(out);
}

int months_between(const Date& a, const Date& b) {
    return (b.year - a.year) * 12 + (b.month - a.month);
}

// Frequency from the month gap between consecutive dates: 12 is annual,
// 3 quarterly, 1 monthly. Fewer than two dates default to annual.
Frequency infer_frequency(const std::vector<Date>& dates,
                          const std::vector<int>& lines) {
    if (dates.size() < 2) return Frequency::annual;
    const int first_gap = months_between(dates[0], dates[1]);
    Frequency f;
    switch (first_gap) {
        case 12: f = Frequency::annual; break;
        case 3: f = Frequency::quarterly; break;
        case 1: f = Frequency::monthly; break;
        default:
            throw input_error("line " + std::to_string(lines[1]) +
                              ": unsupported date spacing of " +
                              std::to_string(first_gap) +
                              " months (expected 1, 3 or 12)");
    }
    for (std::size_t i = 2; i < dates.size(); ++i) {
        const int gap = months_between(dates[i - 1], dates[i]);
        if (gap != first_gap) {
            throw input_error("line " + std::to_string(lines[i]) +
                              ": inconsistent date spacing (" +
                              std::to_string(gap) + " months, expected " +
                              std::to_string(first_gap) + ")");
        }
    }
    return f;
}

// Spacing inference tolerant of missing rows: the smallest month gap of the
// sorted dates picks the frequency, and every other gap must be a multiple
// of it.
Frequency infer_frequency_lenient(std::vector<Date> dates) {
    if (dates.size() < 2) return Frequency::annual;
    std::sort(dates.begin(), dates.end(), [](const Date& a, const Date& b) {
        return std::tie(a.year, a.month, a.day) < std::tie(b.year, b.month, b.day);
    });
    int base = 0;
    for (std::size_t i = 1; i < dates.size(); ++i) {
        const int gap = months_between(dates[i - 1], dates[i]);
        if (gap <= 0) continue;  // duplicate dates surface later as duplicate periods
        if (base == 0 || gap < base) base = gap;
    }
    if (base == 0) return Frequency::annual;
    Frequency f;
    if (base % 12 == 0) {
        f = Frequency::annual;
        base = 12;
    } else if (base % 3 == 0) {
        f = Frequency::quarterly;
        base = 3;
    } else {
        f = Frequency::monthly;
        base = 1;
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        const int gap = months_between(dates[i - 1], dates[i]);
        if (gap > 0 && gap % base != 0) {
            throw input_error("inconsistent date spacing: gap of " +
                              std::to_string(gap) + " months is not a multiple of " +
                              std::to_string(base));
        }
    }
    return f;
}

Period to_period(const Date& d, Frequency f) {
    switch (f) {
        case Frequency::annual: return {d.year, 0};
        case Frequency::quarterly: return {d.year, (d.month - 1) / 3 + 1};
        case Frequency::monthly: return {d.year, d.month};
    }
    return {d.year, 0};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        if (cur.back() == '\r') cur.pop_back();
        lines.push_back(std::move(cur));
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace

Series parse_fred_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) {
        throw input_error("line 1: malformed header: file is empty");
    }
    const std::string& header = lines[0];
    const auto comma = header.find(',');
    if (comma == std::string::npos || header.substr(0, comma) != "DATE" ||
        comma + 1 >= header.size() ||
        header.find(',', comma + 1) != std::string::npos) {
        throw input_error("line 1: malformed header: expected 'DATE,<SERIES_ID>'");
    }
    const std::string name = header.substr(comma + 1);

    std::vector<Date> dates;
    std::vector<int> line_numbers;
    std::vector<std::optional<double>> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i) + 1;
        const std::string& line = lines[i];
        if (line.empty()) {
            throw input_error("line " + std::to_string(line_no) + ": empty line");
        }
        const auto c = line.find(',');
        if (c == std::string::npos || line.find(',', c + 1) != std::string::npos) {
            throw input_error("line " + std::to_string(line_no) +
                              ": expected 2 comma-separated fields");
        }
        const std::string date_text = line.substr(0, c);
        const std::string value_text = line.substr(c + 1);
        Date d;
        if (!parse_full_date(date_text, d)) {
            throw input_error("line " + std::to_string(line_no) +
                              ": unparseable date '" + date_text + "'");
        }
        dates.push_back(d);
        line_numbers.push_back(line_no);
        if (value_text == ".") {
            values.push_back(std::nullopt);
        } else {
            double v = 0.0;
            if (!parse_value(value_text, v)) {
                throw input_error("line " + std::to_string(line_no) +
                                  ": unparseable value '" + value_text + "'");
            }
            values.push_back(v);
        }
    }

    const Frequency freq = infer_frequency(dates, line_numbers);
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (values[i].has_value()) {
            obs.push_back({to_period(dates[i], freq), *values[i]});
        }
    }
    return Series(name, "", freq, std::move(obs));
}

namespace {

Period next_period(const Period& p, Frequency f) {
    if (f == Frequency::annual) return {p.year + 1, 0};
    const int per_year = subperiods_per_year(f);
    if (p.sub == per_year) return {p.year + 1, 1};
    return {p.year, p.sub + 1};
}

std::string fred_date(const Period& p, Frequency f) {
    int month = 1;
    if (f == Frequency::quarterly) month = 3 * (p.sub - 1) + 1;
    if (f == Frequency::monthly) month = p.sub;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-01", p.year, month);
    return buf;
}

}  // namespace

std::string serialize_fred_csv(const Series& s) {
    std::string out = "DATE," + s.name() + "\n";
    if (s.empty()) return out;
    const auto& obs = s.observations();
    std::size_t i = 0;
    for (Period p = obs.front().period; !(obs.back().period < p);
         p = next_period(p, s.frequency())) {
        out += fred_date(p, s.frequency());
        out += ',';
        if (i < obs.size() && obs[i].period == p) {
            out += format_double(obs[i].value);
            ++i;
        } else {
            out += '.';
        }
        out += '\n';
    }
    return out;
}

namespace {

struct CsvRecord {
    std::vector<std::string> fields;
    int line = 0;  // 1-based line the record starts on
};

// RFC-4180: quoted fields may contain commas, doubled quotes and newlines.
std::vector<CsvRecord> parse_csv(const std::string& text) {
    std::vector<CsvRecord> records;
    CsvRecord record;
    record.line = 1;
    std::string field;
    bool in_quotes = false;
    bool any_char_in_record = false;
    int line = 1;
    int quote_start_line = 1;

    auto end_field = [&] {
        record.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record = CsvRecord{};
        record.line = line;
        any_char_in_record = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                quote_start_line = line;
                any_char_in_record = true;
                break;
            case ',':
                end_field();
                any_char_in_record = true;
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                if (any_char_in_record || !field.empty() ||
                    !record.fields.empty()) {
                    end_record();
                } else {
                    record.line = line;
                }
                break;
            default:
                field.push_back(c);
                any_char_in_record = true;
                break;
        }
    }
    if (in_quotes) {
        throw input_error("unterminated quoted field starting at line " +
                          std::to_string(quote_start_line));
    }
    if (any_char_in_record || !field.empty() || !record.fields.empty()) {
        end_record();
    }
    return records;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

Series parse_generic_csv(const std::string& text, const std::string& date_column,
                         const std::string& value_column) {
    const std::vector<CsvRecord> records = parse_csv(text);
    if (records.empty()) {
        throw input_error("no header row");
    }
    const std::vector<std::string>& header = records[0].fields;
    auto column_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw input_error("column '" + name + "' not found; available: " +
                              join(header, ", "));
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_idx = column_index(date_column);
    const std::size_t value_idx = column_index(value_column);

    std::vector<Date> dates;
    std::vector<double> values;
    bool saw_bare_year = false;
    bool saw_full_date = false;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const CsvRecord& rec = records[i];
        if (rec.fields.size() != header.size()) {
            throw input_error("line " + std::to_string(rec.line) + ": row has " +
                              std::to_string(rec.fields.size()) +
                              " fields, header has " +
                              std::to_string(header.size()));
        }
        const std::string& date_text = rec.fields[date_idx];
        Date d;
        if (date_text.size() == 4 && all_digits(date_text)) {
            d = {to_int(date_text), 1, 1};
            saw_bare_year = true;
        } else if (parse_full_date(date_text, d)) {
            saw_full_date = true;
        } else {
            throw input_error("line " + std::to_string(rec.line) +
                              ": unparseable date '" + date_text + "'");
        }
        if (saw_bare_year && saw_full_date) {
            throw input_error("line " + std::to_string(rec.line) +
                              ": mixed bare-year and full dates");
        }
        const std::string& value_text = rec.fields[value_idx];
        if (value_text.empty() || value_text == ".") {
            continue;  // missing cell
        }
        double v = 0.0;
        if (!parse_value(value_text, v)) {
            throw input_error("line " + std::to_string(rec.line) +
                              ": unparseable value '" + value_text + "'");
        }
        dates.push_back(d);
        values.push_back(v);
    }

    Frequency freq = Frequency::annual;
    if (saw_full_date) {
        freq = infer_frequency_lenient(dates);
    }

    std::vector<Observation> obs;
    obs.reserve(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        obs.push_back({to_period(dates[i], freq), values[i]});
    }
    std::sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) {
        return a.period < b.period;
    });
    return Series(value_column, "", freq, std::move(obs));
}

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw input_error(what + " at " + path);
}

void require_known_keys(const json& obj, const std::string& path,
                        std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return key == k;
            }) == known.end()) {
            config_error(path + "." + key, "unknown field");
        }
    }
}

std::string require_string(const json& obj, const std::string& path,
                           const char* key) {
    if (!obj.contains(key)) config_error(path + "." + key, "missing field");
    if (!obj[key].is_string()) config_error(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

template <typename Enum>
Enum parse_enum(const std::string& text, const std::string& path,
                std::initializer_list<std::pair<const char*, Enum>> table) {
    for (const auto& [name, value] : table) {
        if (text == name) return value;
    }
    std::string expected;
    for (const auto& [name, value] : table) {
        if (!expected.empty()) expected += " or ";
        expected += name;
    }
    config_error(path, "invalid value '" + text + "' (expected " + expected + ")");
}

SourceSpec parse_source(const json& src, const std::string& path) {
    if (!src.is_object()) config_error(path, "expected an object");
    require_known_keys(src, path,
                       {"path", "format", "variable", "frequency", "annualize",
                        "date_column", "value_column", "unit"});
    SourceSpec spec;
    spec.path = require_string(src, path, "path");
    if (spec.path.empty()) config_error(path + ".path", "empty path");
    spec.format = parse_enum<SourceFormat>(
        require_string(src, path, "format"), path + ".format",
        {{"fred_csv", SourceFormat::fred_csv},
         {"generic_csv", SourceFormat::generic_csv}});
    spec.variable = parse_enum<Variable>(
        require_string(src, path, "variable"), path + ".variable",
        {{"gdp", Variable::gdp},
         {"capital", Variable::capital},
         {"labor", Variable::labor},
         {"tfp", Variable::tfp}});
    spec.frequency = parse_enum<Frequency>(
        require_string(src, path, "frequency"), path + ".frequency",
        {{"annual", Frequency::annual},
         {"quarterly", Frequency::quarterly},
         {"monthly", Frequency::monthly}});
    if (src.contains("annualize")) {
        spec.annualize = parse_enum<AnnualizeMethod>(
            require_string(src, path, "annualize"), path + ".annualize",
            {{"mean", AnnualizeMethod::mean},
             {"last", AnnualizeMethod::last},
             {"sum", AnnualizeMethod::sum}});
    }
    if (src.contains("unit")) spec.unit = require_string(src, path, "unit");

    if (spec.format == SourceFormat::generic_csv) {
        spec.date_column = require_string(src, path, "date_column");
        spec.value_column = require_string(src, path, "value_column");
        if (spec.date_column.empty())
            config_error(path + ".date_column", "generic_csv requires date_column");
        if (spec.value_column.empty())
            config_error(path + ".value_column", "generic_csv requires value_column");
    } else {
        if (src.contains("date_column"))
            config_error(path + ".date_column", "fred_csv forbids date_column");
        if (src.contains("value_column"))
            config_error(path + ".value_column", "fred_csv forbids value_column");
    }
    return spec;
}

}  // namespace

PipelineConfig load_config(const std::string& json_text,
                           const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw input_error("expected an object at $");
    require_known_keys(doc, "$",
                       {"sources", "alpha", "inversion_mode", "residual_mode",
                        "regression_orientation", "sample_window", "output"});

    PipelineConfig config;
    config.base_dir = base_dir;

    if (!doc.contains("sources")) config_error("$.sources", "missing field");
    const json& sources = doc["sources"];
    if (!sources.is_array() || sources.size() != 4) {
        config_error("$.sources", "expected exactly 4 sources (one per variable)");
    }
    bool seen[4] = {false, false, false, false};
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const std::string path = "$.sources[" + std::to_string(i) + "]";
        SourceSpec spec = parse_source(sources[i], path);
        const int v = static_cast<int>(spec.variable);
        if (seen[v]) {
            config_error(path + ".variable",
                         std::string("duplicate variable ") + to_string(spec.variable));
        }
        seen[v] = true;
        config.sources.push_back(std::move(spec));
    }

    if (!doc.contains("alpha")) {
        config.alpha = 0.33;
        config.alpha_provenance =
            "default 0.33 (conventional capital share, user-overridable)";
    } else if (doc["alpha"].is_number()) {
        const double alpha = doc["alpha"].get<double>();
        if (!(alpha > 0.0) || !(alpha < 1.0)) {
            config_error("$.alpha", "alpha out of (0,1)");
        }
        config.alpha = alpha;
        config.alpha_provenance = "config";
    } else if (doc["alpha"].is_string() &&
               doc["alpha"].get<std::string>() == "estimate") {
        config.alpha = std::nullopt;
        config.alpha_provenance =
            "estimated from the panel (OLS slope of dln Y on dln K)";
    } else {
        config_error("$.alpha",
                     "invalid alpha (expected a number in (0,1) or \"estimate\")");
    }

    if (doc.contains("inversion_mode")) {
        config.inversion_mode = parse_enum<model::InversionMode>(
            require_string(doc, "$", "inversion_mode"), "$.inversion_mode",
            {{"consistent", model::InversionMode::consistent},
             {"paper_literal", model::InversionMode::paper_literal}});
    }
    if (doc.contains("residual_mode")) {
        config.residual_mode = parse_enum<model::ResidualMode>(
            require_string(doc, "$", "residual_mode"), "$.residual_mode",
            {{"consistent", model::ResidualMode::consistent},
             {"paper_literal", model::ResidualMode::paper_literal}});
    }
    if (doc.contains("regression_orientation")) {
        config.orientation = parse_enum<Orientation>(
            require_string(doc, "$", "regression_orientation"),
            "$.regression_orientation",
            {{"gdp_on_agi", Orientation::gdp_on_agi},
             {"agi_on_gdp", Orientation::agi_on_gdp}});
    }
    if (doc.contains("sample_window")) {
        const json& w = doc["sample_window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() ||
            !w[1].is_number_integer()) {
            config_error("$.sample_window", "expected [first_year, last_year]");
        }
        const int first = w[0].get<int>();
        const int last = w[1].get<int>();
        if (first > last) {
            config_error("$.sample_window", "first year exceeds last year");
        }
        config.sample_window = {first, last};
    }
    if (doc.contains("output")) {
        const json& out = doc["output"];
        if (!out.is_object()) config_error("$.output", "expected an object");
        require_known_keys(out, "$.output", {"format", "path"});
        if (out.contains("format")) {
            config.output_format = parse_enum<ReportFormat>(
                require_string(out, "$.output", "format"), "$.output.format",
                {{"json", ReportFormat::json}, {"csv", ReportFormat::csv}});
        }
        if (out.contains("path")) {
            config.output_path = require_string(out, "$.output", "path");
        }
    }
    return config;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw input_error("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_config(buffer.str(), path.parent_path());
}

const SourceSpec& source_for(const PipelineConfig& config, Variable v) {
    for (const SourceSpec& spec : config.sources) {
        if (spec.variable == v) return spec;
    }
    throw input_error(std::string("no source for variable ") + to_string(v));
}

namespace {

Series load_source(const SourceSpec& spec, const PipelineConfig& config) {
    std::filesystem::path file = spec.path;
    if (file.is_relative()) file = config.base_dir / file;
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw input_error(spec.path + ": cannot open file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();

    try {
        Series s = spec.format == SourceFormat::fred_csv
                       ? parse_fred_csv(buffer.str())
                       : parse_generic_csv(buffer.str(), spec.date_column,
                                           spec.value_column);
        if (s.frequency() != spec.frequency) {
            throw input_error(std::string("declared ") + to_string(spec.frequency) +
                              " but parsed " + to_string(s.frequency()));
        }
        if (!spec.unit.empty()) {
            s = Series(s.name(), spec.unit, s.frequency(), s.observations());
        }
        if (s.frequency() != Frequency::annual) {
            s = to_annual(s, spec.annualize);
        }
        if (config.sample_window) {
            s = clip_years(s, config.sample_window->first,
                           config.sample_window->second);
        }
        if (s.empty()) {
            throw input_error("no observations");
        }
        return s;
    } catch (const input_error& e) {
        throw input_error(spec.path + ": " + e.what());
    } catch (const numeric_error& e) {
        throw numeric_error(spec.path + ": " + e.what());
    }
}

}  // namespace

AlignedPanel assemble(const PipelineConfig& config) {
    const Series gdp = load_source(source_for(config, Variable::gdp), config);
    const Series capital = load_source(source_for(config, Variable::capital), config);
    const Series labor = load_source(source_for(config, Variable::labor), config);
    const Series tfp = load_source(source_for(config, Variable::tfp), config);
    return align(gdp, capital, labor, tfp);
}

}  // namespace agimetrics::ingest
