#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gca/config.hpp"
#include "gca/extremes.hpp"
#include "gca/statcf.hpp"
#include "gca/timeseries.hpp"
#include "json.hpp"

namespace gca {

/// 64-bit FNV-1a hash, used to fingerprint inputs in the report.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Which part of the configured analysis to run.
enum class Command { Fit, Attribute, Granger, Fingerprint, Simulate, Report };

[[nodiscard]] std::string to_string(Command c);

struct RunOptions {
    Command command = Command::Report;
    std::optional<std::uint64_t> seed;  ///< overrides the config seed
    std::optional<double> level;        ///< overrides the config level
};

/// Series after loading and transforms, ready for fitting.
struct PreparedData {
    Dataset dataset;
    AuxiliarySeries auxiliary;
    std::map<std::string, std::uint64_t> file_hashes;  ///< keyed by path relative to the config directory
};

/**
 * @brief Loads every series of the config and applies its transforms.
 * Errors carry the config location of the offending element.
 */
[[nodiscard]] PreparedData prepare_data(const AnalysisConfig& config);

struct RunResult {
    nlohmann::ordered_json report;
    std::vector<std::string> warnings;
    std::optional<PreparedData> data;
    std::optional<CounterfactualModel> model;
    std::optional<GevFit> gev;
    std::string anthropogenic;  ///< covariate plotted with the auxiliary forcing components, if any
    /// Flat tables, file name -> rows (first row is the header).
    std::map<std::string, std::vector<std::vector<std::string>>> tables;
};

/// Executes the requested part of the analysis. Deterministic for a fixed config, data and seed.
[[nodiscard]] RunResult run(const AnalysisConfig& config, const RunOptions& options = {});

/// Writes report.json and the flat CSV tables into `out_dir`.
void write_outputs(const RunResult& result, const std::filesystem::path& out_dir);

/**
 * @brief Writes CSVs for redrawing the input and fit figures: response, forcing
 * components, one file per remaining covariate, and fitted.csv with columns
 * year, observed, fitted, residual. Returns the files written.
 */
std::vector<std::filesystem::path> emit_plot_data(const RunResult& result, const std::filesystem::path& out_dir);

}  // namespace gca
