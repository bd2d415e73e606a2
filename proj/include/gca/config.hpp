#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gca/granger.hpp"
#include "gca/statcf.hpp"
#include "gca/synth.hpp"
#include "gca/timeseries.hpp"

namespace gca {

struct Transform {
    enum class Kind { Anomalies, BaselineShift, SumWith };
    Kind kind = Kind::Anomalies;
    Year first = 0;  ///< anomalies window, or the baseline_shift reference year in `first`
    Year last = 0;
    std::filesystem::path path;  ///< sum_with operand
};

struct SeriesSpec {
    std::string name;
    std::filesystem::path path;
    std::string unit;
    CovariateRole role = CovariateRole::Forced;
    std::vector<Transform> transforms;
    std::string where;  ///< location in the config, for error messages
};

struct DeltaSpec {
    std::string name;
    std::string from = "PI";
    std::string to = "PD";
};

struct GrangerSpec {
    std::string name;
    VarSpec var;
    double alpha = 0.05;
    std::optional<int> max_order;  ///< when set, the order is chosen by `criterion`
    InformationCriterion criterion = InformationCriterion::Bic;
};

struct FingerprintSource {
    enum class Kind { File, Fitted, Component };
    std::string name;
    Kind kind = Kind::File;
    std::filesystem::path path;
    std::string component;  ///< covariate whose fitted contribution is used, for Kind::Component
};

struct FingerprintSpec {
    std::string name;
    std::vector<FingerprintSource> fingerprints;
    std::size_t max_fingerprints = 2;
    std::string compare_delta;  ///< name of a delta to compare against; empty skips the comparison
};

struct RiskRatioSpec {
    std::string name;
    double threshold = 0.0;
    std::string factual = "PD";
    std::string counterfactual = "PI";
};

struct TestsSpec {
    std::vector<DeltaSpec> deltas;
    bool factor_deltas = false;
    std::vector<GrangerSpec> granger;
    std::vector<FingerprintSpec> fingerprint;
    std::vector<RiskRatioSpec> risk_ratios;
};

struct InferenceSpec {
    InferenceMethod method = InferenceMethod::Analytic;
    int replicates = 2000;
    std::uint64_t seed = 1;
    double level = 0.95;
};

struct SimulateSpec {
    CausalGraphSpec graph;
    VarSpec test;
    double alpha = 0.05;
    int replicates = 1000;
};

struct AnalysisConfig {
    std::filesystem::path source;    ///< the config file, or empty for in-memory text
    std::filesystem::path base_dir;  ///< relative paths in the config resolve against this
    std::string text;                ///< raw config text, hashed for provenance
    SeriesSpec response;
    std::optional<std::pair<Year, Year>> anomaly_baseline;
    std::vector<SeriesSpec> covariates;
    std::vector<SeriesSpec> auxiliary;
    std::optional<std::pair<Year, Year>> span;
    bool include_intercept = true;
    ErrorFamily error_family = ErrorFamily::Gaussian;
    std::optional<ScenarioWindows> pi_pd_scenarios;
    std::vector<Scenario> named_scenarios;
    TestsSpec tests;
    InferenceSpec inference;
    std::optional<SimulateSpec> simulate;
};

/// Reads and validates a JSON config. Relative paths resolve against the file's directory.
/// @throws Error(ConfigError) naming the offending element; Error(IoError) if unreadable.
[[nodiscard]] AnalysisConfig load_config(const std::filesystem::path& path);

/// As load_config, from text, with relative paths resolved against `base_dir`.
[[nodiscard]] AnalysisConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace gca
