#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gca {

using Year = int;

/// Marker for a missing observation.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

[[nodiscard]] bool is_missing(double value) noexcept;

/**
 * @brief Year-indexed real series with a name and an opaque unit label.
 *
 * Years are strictly increasing integers; missing entries are stored as NaN.
 * Instances are immutable once constructed.
 */
class TimeSeries {
public:
    TimeSeries() = default;
    /// @throws Error(InvalidSeries) if years are not strictly increasing or the lengths differ.
    TimeSeries(std::string name, std::string unit, std::vector<Year> years, std::vector<double> values);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::string& unit() const noexcept { return unit_; }
    [[nodiscard]] std::span<const Year> years() const noexcept { return years_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return years_.size(); }
    [[nodiscard]] bool empty() const noexcept { return years_.empty(); }
    [[nodiscard]] Year first_year() const;
    [[nodiscard]] Year last_year() const;

    /// Index of `year`, if present.
    [[nodiscard]] std::optional<std::size_t> index_of(Year year) const noexcept;
    /// Value at `year`; throws Error(YearNotFound) if absent or missing.
    [[nodiscard]] double at(Year year) const;

    [[nodiscard]] TimeSeries renamed(std::string name, std::string unit) const;
    [[nodiscard]] TimeSeries with_values(std::vector<double> values) const;

    friend bool operator==(const TimeSeries& a, const TimeSeries& b);

private:
    std::string name_;
    std::string unit_;
    std::vector<Year> years_;
    std::vector<double> values_;
};

enum class CovariateRole { Forced, Driver };

struct Covariate {
    TimeSeries series;
    CovariateRole role = CovariateRole::Forced;
};

/// Series restricted to their common complete years.
struct Alignment {
    std::vector<TimeSeries> series;
    std::size_t dropped_rows = 0;  ///< years inside the common span removed because some series was missing there
};

/**
 * @brief Restrict series to the intersection of their year ranges and drop
 * every year where any series is absent or missing (listwise deletion).
 *
 * @throws Error(EmptyOverlap) if fewer than two series are given or nothing survives.
 */
[[nodiscard]] Alignment align(std::span<const TimeSeries> series);

/// Response plus tagged covariates sharing one year vector.
class Dataset {
public:
    Dataset() = default;
    /// Aligns all members; throws as `align` does.
    Dataset(TimeSeries response, std::vector<Covariate> covariates);

    [[nodiscard]] const TimeSeries& response() const noexcept { return response_; }
    [[nodiscard]] const std::vector<Covariate>& covariates() const noexcept { return covariates_; }
    [[nodiscard]] std::span<const Year> years() const noexcept { return response_.years(); }
    [[nodiscard]] std::size_t rows() const noexcept { return response_.size(); }
    [[nodiscard]] std::pair<Year, Year> span() const;
    [[nodiscard]] std::size_t dropped_rows() const noexcept { return dropped_rows_; }

    [[nodiscard]] std::vector<std::string> covariate_names() const;
    /// Response or covariate by name; throws Error(UnknownSeries).
    [[nodiscard]] const TimeSeries& series(const std::string& name) const;
    [[nodiscard]] bool contains(const std::string& name) const noexcept;

private:
    TimeSeries response_;
    std::vector<Covariate> covariates_;
    std::size_t dropped_rows_ = 0;
};

/// `s` minus its mean over [baseline_first, baseline_last].
[[nodiscard]] TimeSeries anomalies(const TimeSeries& s, Year baseline_first, Year baseline_last);

/// `s` minus its value at `reference_year`; exactly zero at that year.
[[nodiscard]] TimeSeries baseline_shift(const TimeSeries& s, Year reference_year);

/// Arithmetic mean of the non-missing values in [first, last].
[[nodiscard]] double climatological_mean(const TimeSeries& s, Year first, Year last);

/// Minimum and maximum of the non-missing values.
[[nodiscard]] std::pair<double, double> series_range(const TimeSeries& s);

/// Year-wise sum over the common years of `a` and `b`. Keeps the name and unit of `a`.
[[nodiscard]] TimeSeries add(const TimeSeries& a, const TimeSeries& b);

/// Subset of `s` within [first, last].
[[nodiscard]] TimeSeries restrict_years(const TimeSeries& s, Year first, Year last);

}  // namespace gca
