#pragma once

#include <filesystem>
#include <string>

#include "gca/timeseries.hpp"

namespace gca {

/**
 * @brief Reads a `year,value` file with a header row. `NA` marks a missing value.
 *
 * @throws Error(IoError) if the file cannot be opened.
 * @throws Error(ParseError) with the offending line number.
 * @throws Error(DuplicateYear) with the line of the repeated year.
 */
[[nodiscard]] TimeSeries load_csv(const std::filesystem::path& path, const std::string& name = "",
                                  const std::string& unit = "");

/// Parses CSV text; `source` labels error messages.
[[nodiscard]] TimeSeries parse_csv(const std::string& text, const std::string& name, const std::string& unit,
                                   const std::string& source = "<text>");

/// Writes the series in the same schema, shortest round-trip formatting, `NA` for missing.
void write_csv(const std::filesystem::path& path, const TimeSeries& series);

/// Shortest decimal text that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);

}  // namespace gca
