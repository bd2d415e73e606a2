#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gca/regress.hpp"
#include "gca/timeseries.hpp"

namespace gca {

enum class ErrorFamily { Gaussian, Gev };

/**
 * @brief Fitted statistical counterfactual: response regressed on forcing and
 * driver covariates, m(t) = m0 + sum_j beta_j X_j(t), Gaussian errors.
 */
class CounterfactualModel {
public:
    CounterfactualModel(Dataset dataset, bool include_intercept, DesignMatrix design, FitResult fit);

    [[nodiscard]] const Dataset& dataset() const noexcept { return dataset_; }
    [[nodiscard]] bool include_intercept() const noexcept { return include_intercept_; }
    [[nodiscard]] ErrorFamily error_family() const noexcept { return ErrorFamily::Gaussian; }
    [[nodiscard]] const DesignMatrix& design() const noexcept { return design_; }
    [[nodiscard]] const FitResult& fit() const noexcept { return fit_; }
    [[nodiscard]] std::vector<std::string> covariate_names() const { return dataset_.covariate_names(); }
    /// Estimated m0, or 0 when the intercept is fixed.
    [[nodiscard]] double intercept() const;

private:
    Dataset dataset_;
    bool include_intercept_;
    DesignMatrix design_;
    FitResult fit_;
};

/// Complete assignment of covariate values, one per model covariate.
struct Scenario {
    std::string name;
    std::map<std::string, double> assignment;
};

enum class InferenceMethod { Analytic, Bootstrap };

struct ChangeEstimate {
    double delta = 0.0;
    Interval ci;
    double level = 0.95;
    double p_value = 1.0;
    double std_error = 0.0;  ///< analytic standard error, or bootstrap standard deviation
    InferenceMethod method = InferenceMethod::Analytic;
};

/// Scenario definitions for a pre-industrial vs present-day contrast.
struct ScenarioWindows {
    Year pi_first = 1900;
    Year pi_last = 1929;
    Year pd_year = 2015;
    /// Covariate treated as anthropogenic forcing; empty selects the first forced covariate.
    std::string anthropogenic;
};

[[nodiscard]] CounterfactualModel fit_statcf(const Dataset& dataset, bool include_intercept,
                                             const OlsOptions& options = {});

/// m(s) = m0 + sum_j beta_j s_j. @throws Error(IncompleteScenario)
[[nodiscard]] double scenario_mean(const CounterfactualModel& model, const Scenario& s);

/**
 * @brief Pre-industrial and present-day scenarios.
 *
 * PI puts the anthropogenic covariate at its mean over the PI window; PD puts
 * it at its value in `pd_year`. Every other covariate sits at its mean over the
 * full data span in both scenarios.
 */
[[nodiscard]] std::pair<Scenario, Scenario> make_pi_pd_scenarios(const Dataset& dataset,
                                                                 const ScenarioWindows& windows = {});

/// Name of the covariate `make_pi_pd_scenarios` treats as anthropogenic.
[[nodiscard]] std::string anthropogenic_covariate(const Dataset& dataset, const ScenarioWindows& windows);

/**
 * @brief Change m(s2) - m(s1) with a Student-t interval from c' Cov(beta) c, c = s2 - s1.
 *
 * The intercept cancels. For contrasts in a single covariate the P-value is
 * exactly that covariate's t-test P-value.
 */
[[nodiscard]] ChangeEstimate delta(const CounterfactualModel& model, const Scenario& s1, const Scenario& s2,
                                   double level = 0.95);

/// Auxiliary components of the anthropogenic covariate (e.g. GHG and AER).
using AuxiliarySeries = std::vector<TimeSeries>;

/**
 * @brief Forcing- and driver-specific changes.
 *
 * Each auxiliary component contributes beta_ant [X(pd) - mean X(pi window)];
 * every non-anthropogenic covariate contributes beta_j [max X_j - min X_j].
 * Intervals are the coefficient intervals rescaled; P-values are the coefficient P-values.
 *
 * @throws Error(MissingAuxiliarySeries) if `auxiliary` is empty.
 */
[[nodiscard]] std::map<std::string, ChangeEstimate> factor_deltas(const CounterfactualModel& model,
                                                                  const AuxiliarySeries& auxiliary,
                                                                  const ScenarioWindows& windows = {},
                                                                  double level = 0.95);

struct BootstrapOptions {
    int replicates = 2000;
    std::uint64_t seed = 1;
    double level = 0.95;
};

/**
 * @brief Parametric residual bootstrap of delta(s1, s2).
 *
 * Each replicate simulates y* = fitted + N(0, residual_sd^2), refits and
 * recomputes the change. Percentile interval; two-sided tail-proportion P-value
 * for H0: delta = 0. Deterministic for a given seed.
 *
 * @throws Error(TooFewReplicates) below 200 replicates.
 */
[[nodiscard]] ChangeEstimate bootstrap_delta(const CounterfactualModel& model, const Scenario& s1, const Scenario& s2,
                                             const BootstrapOptions& options = {});

/// Raw bootstrap draws, exposed for diagnostics and tests.
[[nodiscard]] std::vector<double> bootstrap_delta_draws(const CounterfactualModel& model, const Scenario& s1,
                                                        const Scenario& s2, const BootstrapOptions& options);

}  // namespace gca
