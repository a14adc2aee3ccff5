#include "agimetrics/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>

#include "agimetrics/errors.hpp"

namespace agimetrics {

const char* to_string(Frequency f) {
    switch (f) {
        case Frequency::annual: return "annual";
        case Frequency::quarterly: return "quarterly";
        case Frequency::monthly: return "monthly";
    }
    return "?";
}

const char* to_string(AnnualizeMethod m) {
    switch (m) {
        case AnnualizeMethod::mean: return "mean";
        case AnnualizeMethod::last: return "last";
        case AnnualizeMethod::sum: return "sum";
    }
    return "?";
}

int subperiods_per_year(Frequency f) {
    switch (f) {
        case Frequency::annual: return 1;
        case Frequency::quarterly: return 4;
        case Frequency::monthly: return 12;
    }
    return 1;
}

std::string period_label(const Period& p, Frequency f) {
    char buf[16];
    switch (f) {
        case Frequency::annual:
            std::snprintf(buf, sizeof(buf), "%d", p.year);
            break;
        case Frequency::quarterly:
            std::snprintf(buf, sizeof(buf), "%dQ%d", p.year, p.sub);
            break;
        case Frequency::monthly:
            std::snprintf(buf, sizeof(buf), "%d-%02d", p.year, p.sub);
            break;
    }
    return buf;
}

namespace {

bool sub_in_range(const Period& p, Frequency f) {
    if (f == Frequency::annual) return p.sub == 0;
    return p.sub >= 1 && p.sub <= subperiods_per_year(f);
}

}  // namespace

Series::Series(std::string name, std::string unit, Frequency frequency,
               std::vector<Observation> observations)
    : name_(std::move(name)),
      unit_(std::move(unit)),
      frequency_(frequency),
      observations_(std::move(observations)) {
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const Observation& o = observations_[i];
        if (!sub_in_range(o.period, frequency_)) {
            throw input_error("period " + period_label(o.period, frequency_) +
                              " does not match declared frequency " +
                              to_string(frequency_));
        }
        if (!std::isfinite(o.value)) {
            throw input_error("non-finite value at " +
                              period_label(o.period, frequency_));
        }
        if (i > 0 && !(observations_[i - 1].period < o.period)) {
            if (observations_[i - 1].period == o.period) {
                throw input_error("duplicate period " +
                                  period_label(o.period, frequency_));
            }
            throw input_error("periods not sorted at " +
                              period_label(o.period, frequency_));
        }
    }
}

std::vector<double> Series::values() const {
    std::vector<double> out;
    out.reserve(observations_.size());
    for (const Observation& o : observations_) out.push_back(o.value);
    return out;
}

Series make_series(std::string name, std::string unit, Frequency frequency,
                   std::vector<Observation> points) {
    if (points.empty()) {
        throw input_error("no observations in series '" + name + "'");
    }
    std::sort(points.begin(), points.end(),
              [](const Observation& a, const Observation& b) {
                  return a.period < b.period;
              });
    return Series(std::move(name), std::move(unit), frequency,
                  std::move(points));
}

Series to_annual(const Series& s, AnnualizeMethod method) {
    if (s.frequency() == Frequency::annual) {
        throw input_error("series '" + s.name() + "' is already annual");
    }
    const int per_year = subperiods_per_year(s.frequency());

    std::vector<Observation> out;
    const auto& obs = s.observations();
    for (std::size_t i = 0; i < obs.size();) {
        const int year = obs[i].period.year;
        std::size_t j = i;
        double sum = 0.0;
        while (j < obs.size() && obs[j].period.year == year) {
            sum += obs[j].value;
            ++j;
        }
        const std::size_t count = j - i;
        if (count == static_cast<std::size_t>(per_year)) {
            double v = 0.0;
            switch (method) {
                case AnnualizeMethod::mean: v = sum / per_year; break;
                case AnnualizeMethod::last: v = obs[j - 1].value; break;
                case AnnualizeMethod::sum: v = sum; break;
            }
            out.push_back({Period{year, 0}, v});
        }
        i = j;
    }
    return Series(s.name(), s.unit(), Frequency::annual, std::move(out));
}

namespace {

void require_annual(const Series& s, const char* role) {
    if (s.frequency() != Frequency::annual) {
        throw input_error(std::string("series '") + s.name() + "' (" + role +
                          ") is not annual");
    }
}

}  // namespace

AlignedPanel::AlignedPanel(std::vector<int> years, std::vector<double> y,
                           std::vector<double> k, std::vector<double> l,
                           std::vector<double> a)
    : years_(std::move(years)),
      y_(std::move(y)),
      k_(std::move(k)),
      l_(std::move(l)),
      a_(std::move(a)) {
    const std::size_t n = years_.size();
    if (y_.size() != n || k_.size() != n || l_.size() != n || a_.size() != n) {
        throw input_error("panel columns have mismatched lengths");
    }
    if (n < 3) {
        throw input_error("sample too short: " + std::to_string(n) +
                          " overlapping years (minimum 3)");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (years_[i - 1] >= years_[i]) {
            throw input_error("panel years not strictly increasing at " +
                              std::to_string(years_[i]));
        }
    }
    const std::pair<const char*, const std::vector<double>*> cols[] = {
        {"y", &y_}, {"k", &k_}, {"l", &l_}, {"a", &a_}};
    for (const auto& [role, col] : cols) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (*col)[i];
            if (!std::isfinite(v)) {
                throw input_error(std::string("non-finite value in ") + role +
                                  " at " + std::to_string(years_[i]));
            }
            if (v <= 0.0) {
                throw input_error(std::string("non-positive value in ") + role +
                                  " at " + std::to_string(years_[i]));
            }
        }
    }
}

AlignedPanel align(const Series& y, const Series& k, const Series& l,
                   const Series& a) {
    require_annual(y, "y");
    require_annual(k, "k");
    require_annual(l, "l");
    require_annual(a, "a");

    auto years_of = [](const Series& s) {
        std::vector<int> out;
        out.reserve(s.size());
        for (const Observation& o : s.observations()) out.push_back(o.period.year);
        return out;
    };
    std::vector<int> years = years_of(y);
    for (const Series* s : {&k, &l, &a}) {
        const std::vector<int> other = years_of(*s);
        std::vector<int> common;
        std::set_intersection(years.begin(), years.end(), other.begin(),
                              other.end(), std::back_inserter(common));
        years = std::move(common);
    }
    if (years.size() < 3) {
        throw input_error("sample too short: " + std::to_string(years.size()) +
                          " overlapping years (minimum 3)");
    }

    auto column = [&years](const Series& s) {
        std::vector<double> out;
        out.reserve(years.size());
        std::size_t i = 0;
        const auto& obs = s.observations();
        for (int year : years) {
            while (obs[i].period.year != year) ++i;
            out.push_back(obs[i].value);
        }
        return out;
    };
    return AlignedPanel(years, column(y), column(k), column(l), column(a));
}

std::vector<double> log_transform(std::span<const double> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) {
            throw numeric_error("non-positive input to log at index " +
                                std::to_string(i));
        }
        out.push_back(std::log(values[i]));
    }
    return out;
}

Series pct_change(const Series& s) {
    const auto& obs = s.observations();
    if (obs.size() < 2) {
        throw input_error("pct_change needs at least 2 observations, got " +
                          std::to_string(obs.size()));
    }
    std::vector<Observation> out;
    out.reserve(obs.size() - 1);
    for (std::size_t i = 1; i < obs.size(); ++i) {
        const double base = obs[i - 1].value;
        if (base == 0.0) {
            throw numeric_error(
                "pct_change: zero base value at " +
                period_label(obs[i - 1].period, s.frequency()));
        }
        out.push_back({obs[i].period, 100.0 * (obs[i].value - base) / base});
    }
    return Series(s.name(), "%", s.frequency(), std::move(out));
}

Series clip_years(const Series& s, int first, int last) {
    std::vector<Observation> out;
    for (const Observation& o : s.observations()) {
        if (o.period.year >= first && o.period.year <= last) out.push_back(o);
    }
    return Series(s.name(), s.unit(), s.frequency(), std::move(out));
}

}  // namespace agimetrics
