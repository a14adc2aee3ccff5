#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

namespace agimetrics {

enum class Frequency { annual, quarterly, monthly };
enum class AnnualizeMethod { mean, last, sum };

const char* to_string(Frequency f);
const char* to_string(AnnualizeMethod m);
int subperiods_per_year(Frequency f);

// Calendar period key. sub is 0 for annual periods, otherwise the 1-based
// quarter or month within the year.
struct Period {
    int year = 0;
    int sub = 0;

    friend auto operator<=>(const Period&, const Period&) = default;
};

// "2020", "2020Q3", "2020-07" depending on frequency.
std::string period_label(const Period& p, Frequency f);

struct Observation {
    Period period;
    double value = 0.0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

// A named, unit-tagged series of (period, value) observations at a declared
// frequency. Periods are strictly increasing, values finite, and every
// period matches the declared frequency; missing observations are simply
// absent. An empty series is representable (it surfaces as "no
// observations" once a pipeline actually needs data from it).
class Series {
public:
    Series() = default;
    // Validates the invariants; observations must already be sorted.
    Series(std::string name, std::string unit, Frequency frequency,
           std::vector<Observation> observations);

    const std::string& name() const { return name_; }
    const std::string& unit() const { return unit_; }
    Frequency frequency() const { return frequency_; }
    const std::vector<Observation>& observations() const { return observations_; }
    std::size_t size() const { return observations_.size(); }
    bool empty() const { return observations_.empty(); }

    std::vector<double> values() const;

    friend bool operator==(const Series&, const Series&) = default;

private:
    std::string name_;
    std::string unit_;
    Frequency frequency_ = Frequency::annual;
    std::vector<Observation> observations_;
};

// Year-joined matrix of the model variables over a common sample window.
// All four columns have exactly one strictly positive value per year and
// the window is at least 3 years long.
class AlignedPanel {
public:
    AlignedPanel(std::vector<int> years, std::vector<double> y,
                 std::vector<double> k, std::vector<double> l,
                 std::vector<double> a);

    const std::vector<int>& years() const { return years_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& k() const { return k_; }
    const std::vector<double>& l() const { return l_; }
    const std::vector<double>& a() const { return a_; }
    std::size_t size() const { return years_.size(); }
    int first_year() const { return years_.front(); }
    int last_year() const { return years_.back(); }

    friend bool operator==(const AlignedPanel&, const AlignedPanel&) = default;

private:
    std::vector<int> years_;
    std::vector<double> y_;
    std::vector<double> k_;
    std::vector<double> l_;
    std::vector<double> a_;
};

// Builds a Series from possibly-unsorted points. Rejects empty input,
// duplicate periods and non-finite values.
Series make_series(std::string name, std::string unit, Frequency frequency,
                   std::vector<Observation> points);

// Collapses a quarterly or monthly series to annual frequency. Only years
// with a complete set of sub-periods survive; the rest are dropped.
Series to_annual(const Series& s, AnnualizeMethod method);

// Inner-joins four annual series on their common years, in the fixed
// variable order (real GDP, capital stock, labor input, TFP index).
AlignedPanel align(const Series& y, const Series& k, const Series& l,
                   const Series& a);

// Elementwise natural log of strictly positive values.
std::vector<double> log_transform(std::span<const double> values);

// Percent change between consecutive observations: 100*(v_t - v_{t-1})/v_{t-1}.
// Output is one observation shorter and keyed by the later period.
Series pct_change(const Series& s);

// Observations with period.year inside [first, last], other fields unchanged.
Series clip_years(const Series& s, int first, int last);

}  // namespace agimetrics
