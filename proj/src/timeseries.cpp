#include "gca/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "gca/error.hpp"

namespace gca {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyOverlap: return "EmptyOverlap";
        case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
        case ErrorCode::YearNotFound: return "YearNotFound";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::InvalidSeries: return "InvalidSeries";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnknownCoefficient: return "UnknownCoefficient";
        case ErrorCode::UnknownSeries: return "UnknownSeries";
        case ErrorCode::IncompleteScenario: return "IncompleteScenario";
        case ErrorCode::MissingAuxiliarySeries: return "MissingAuxiliarySeries";
        case ErrorCode::NotNested: return "NotNested";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidPeriod: return "InvalidPeriod";
        case ErrorCode::InvalidRss: return "InvalidRss";
        case ErrorCode::TooFewReplicates: return "TooFewReplicates";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DuplicateYear: return "DuplicateYear";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::SupportViolation: return "SupportViolation";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::NonStationary: return "NonStationary";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::IllConditioned:
        case ErrorCode::InsufficientData:
        case ErrorCode::NonConvergence:
        case ErrorCode::SupportViolation:
        case ErrorCode::ZeroDenominator:
        case ErrorCode::NonStationary:
            return true;
        default:
            return false;
    }
}

bool is_missing(double value) noexcept { return std::isnan(value); }

TimeSeries::TimeSeries(std::string name, std::string unit, std::vector<Year> years, std::vector<double> values)
    : name_(std::move(name)), unit_(std::move(unit)), years_(std::move(years)), values_(std::move(values)) {
    if (years_.size() != values_.size()) {
        throw Error(ErrorCode::InvalidSeries, "series '" + name_ + "': " + std::to_string(years_.size()) +
                                                  " years but " + std::to_string(values_.size()) + " values");
    }
    for (std::size_t i = 1; i < years_.size(); ++i) {
        if (years_[i] <= years_[i - 1]) {
            throw Error(ErrorCode::InvalidSeries,
                        "series '" + name_ + "': years not strictly increasing at " + std::to_string(years_[i]));
        }
    }
}

Year TimeSeries::first_year() const {
    if (years_.empty()) throw Error(ErrorCode::EmptySeries, "series '" + name_ + "' is empty");
    return years_.front();
}

Year TimeSeries::last_year() const {
    if (years_.empty()) throw Error(ErrorCode::EmptySeries, "series '" + name_ + "' is empty");
    return years_.back();
}

std::optional<std::size_t> TimeSeries::index_of(Year year) const noexcept {
    auto it = std::lower_bound(years_.begin(), years_.end(), year);
    if (it == years_.end() || *it != year) return std::nullopt;
    return static_cast<std::size_t>(it - years_.begin());
}

double TimeSeries::at(Year year) const {
    auto idx = index_of(year);
    if (!idx || is_missing(values_[*idx])) {
        throw Error(ErrorCode::YearNotFound, "series '" + name_ + "' has no value for " + std::to_string(year));
    }
    return values_[*idx];
}

TimeSeries TimeSeries::renamed(std::string name, std::string unit) const {
    return TimeSeries(std::move(name), std::move(unit), years_, values_);
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    return TimeSeries(name_, unit_, years_, std::move(values));
}

bool operator==(const TimeSeries& a, const TimeSeries& b) {
    if (a.name_ != b.name_ || a.unit_ != b.unit_ || a.years_ != b.years_) return false;
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        const double x = a.values_[i];
        const double y = b.values_[i];
        if (is_missing(x) != is_missing(y)) return false;
        if (!is_missing(x) && x != y) return false;
    }
    return true;
}

Alignment align(std::span<const TimeSeries> series) {
    if (series.size() < 2) throw Error(ErrorCode::EmptyOverlap, "alignment needs at least two series");
    Year lo = std::numeric_limits<Year>::min();
    Year hi = std::numeric_limits<Year>::max();
    for (const auto& s : series) {
        if (s.empty()) throw Error(ErrorCode::EmptyOverlap, "series '" + s.name() + "' is empty");
        lo = std::max(lo, s.first_year());
        hi = std::min(hi, s.last_year());
    }
    if (lo > hi) throw Error(ErrorCode::EmptyOverlap, "series share no common years");

    std::vector<Year> kept;
    std::size_t dropped = 0;
    for (Year y = lo; y <= hi; ++y) {
        bool any_present = false;
        bool all_present = true;
        for (const auto& s : series) {
            auto idx = s.index_of(y);
            const bool ok = idx && !is_missing(s.values()[*idx]);
            any_present = any_present || idx.has_value();
            all_present = all_present && ok;
        }
        if (all_present) {
            kept.push_back(y);
        } else if (any_present) {
            ++dropped;
        }
    }
    if (kept.empty()) throw Error(ErrorCode::EmptyOverlap, "no year is complete in every series");

    Alignment out;
    out.dropped_rows = dropped;
    out.series.reserve(series.size());
    for (const auto& s : series) {
        std::vector<double> values;
        values.reserve(kept.size());
        for (Year y : kept) values.push_back(s.values()[*s.index_of(y)]);
        out.series.emplace_back(s.name(), s.unit(), kept, std::move(values));
    }
    return out;
}

Dataset::Dataset(TimeSeries response, std::vector<Covariate> covariates) {
    if (covariates.empty()) throw Error(ErrorCode::InvalidArgument, "dataset needs at least one covariate");
    std::vector<TimeSeries> all;
    all.reserve(covariates.size() + 1);
    all.push_back(std::move(response));
    for (const auto& c : covariates) {
        for (const auto& s : all) {
            if (s.name() == c.series.name()) {
                throw Error(ErrorCode::InvalidArgument, "duplicate series name '" + s.name() + "'");
            }
        }
        all.push_back(c.series);
    }
    auto aligned = align(all);
    response_ = std::move(aligned.series[0]);
    for (std::size_t i = 0; i < covariates.size(); ++i) {
        covariates_.push_back({std::move(aligned.series[i + 1]), covariates[i].role});
    }
    dropped_rows_ = aligned.dropped_rows;
}

std::pair<Year, Year> Dataset::span() const { return {response_.first_year(), response_.last_year()}; }

std::vector<std::string> Dataset::covariate_names() const {
    std::vector<std::string> names;
    names.reserve(covariates_.size());
    for (const auto& c : covariates_) names.push_back(c.series.name());
    return names;
}

const TimeSeries& Dataset::series(const std::string& name) const {
    if (response_.name() == name) return response_;
    for (const auto& c : covariates_) {
        if (c.series.name() == name) return c.series;
    }
    throw Error(ErrorCode::UnknownSeries, "dataset has no series named '" + name + "'");
}

bool Dataset::contains(const std::string& name) const noexcept {
    if (response_.name() == name) return true;
    return std::any_of(covariates_.begin(), covariates_.end(),
                       [&](const Covariate& c) { return c.series.name() == name; });
}

namespace {

double window_mean(const TimeSeries& s, Year first, Year last) {
    if (first > last) {
        throw Error(ErrorCode::WindowOutOfRange,
                    "window " + std::to_string(first) + "-" + std::to_string(last) + " is empty");
    }
    if (s.empty() || first < s.first_year() || last > s.last_year()) {
        throw Error(ErrorCode::WindowOutOfRange, "window " + std::to_string(first) + "-" + std::to_string(last) +
                                                     " is outside series '" + s.name() + "'");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Year y = s.years()[i];
        const double v = s.values()[i];
        if (y >= first && y <= last && !is_missing(v)) {
            sum += v;
            ++count;
        }
    }
    if (count == 0) {
        throw Error(ErrorCode::WindowOutOfRange, "window " + std::to_string(first) + "-" + std::to_string(last) +
                                                     " holds no values of series '" + s.name() + "'");
    }
    return sum / static_cast<double>(count);
}

TimeSeries shifted(const TimeSeries& s, double offset) {
    std::vector<double> values(s.values().begin(), s.values().end());
    for (double& v : values) {
        if (!is_missing(v)) v -= offset;
    }
    return s.with_values(std::move(values));
}

}  // namespace

TimeSeries anomalies(const TimeSeries& s, Year baseline_first, Year baseline_last) {
    return shifted(s, window_mean(s, baseline_first, baseline_last));
}

TimeSeries baseline_shift(const TimeSeries& s, Year reference_year) { return shifted(s, s.at(reference_year)); }

double climatological_mean(const TimeSeries& s, Year first, Year last) { return window_mean(s, first, last); }

std::pair<double, double> series_range(const TimeSeries& s) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : s.values()) {
        if (is_missing(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo > hi) throw Error(ErrorCode::EmptySeries, "series '" + s.name() + "' has no values");
    return {lo, hi};
}

TimeSeries add(const TimeSeries& a, const TimeSeries& b) {
    std::vector<Year> years;
    std::vector<double> values;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto j = b.index_of(a.years()[i]);
        if (!j) continue;
        years.push_back(a.years()[i]);
        values.push_back(a.values()[i] + b.values()[*j]);  // NaN propagates as missing
    }
    if (years.empty()) throw Error(ErrorCode::EmptyOverlap, "'" + a.name() + "' and '" + b.name() + "' share no years");
    return TimeSeries(a.name(), a.unit(), std::move(years), std::move(values));
}

TimeSeries restrict_years(const TimeSeries& s, Year first, Year last) {
    std::vector<Year> years;
    std::vector<double> values;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.years()[i] >= first && s.years()[i] <= last) {
            years.push_back(s.years()[i]);
            values.push_back(s.values()[i]);
        }
    }
    return TimeSeries(s.name(), s.unit(), std::move(years), std::move(values));
}

}  // namespace gca
