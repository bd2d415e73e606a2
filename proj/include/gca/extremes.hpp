#pragma once

#include <cstddef>
#include <cstdint>

#include "gca/gev.hpp"
#include "gca/regress.hpp"
#include "gca/statcf.hpp"
#include "gca/timeseries.hpp"

namespace gca {

/// GEV fit of the response with location m0 + sum_j mu_j X_j(t) over the dataset covariates.
[[nodiscard]] GevFit gev_fit(const Dataset& dataset, const GevOptions& options = {});

/// Location mu(s) of the fitted GEV under scenario `s`. @throws Error(IncompleteScenario)
[[nodiscard]] double location_at(const GevFit& fit, const Scenario& s);

/// The (1 - 1/period) quantile under scenario `s`. @throws Error(InvalidPeriod) unless period > 1.
[[nodiscard]] double return_level(const GevFit& fit, const Scenario& s, double period);

/// P(Y > threshold) under scenario `s`.
[[nodiscard]] double exceedance_prob(const GevFit& fit, const Scenario& s, double threshold);

struct RiskRatio {
    double value = 1.0;
    double p_factual = 0.0;
    double p_counterfactual = 0.0;
    Interval ci{1.0, 1.0};
    double level = 0.95;
    double p_value_rr1 = 1.0;
    std::size_t replicates_used = 0;
    std::size_t replicates_failed = 0;
};

/**
 * @brief Ratio of exceedance probabilities, factual over counterfactual.
 * @throws Error(ZeroDenominator) if the counterfactual probability is below 1e-300.
 */
[[nodiscard]] RiskRatio risk_ratio(const GevFit& fit, const Scenario& factual, const Scenario& counterfactual,
                                   double threshold);

struct RiskRatioTestOptions {
    int replicates = 1000;
    std::uint64_t seed = 1;
    double level = 0.95;
    GevOptions gev;
};

/**
 * @brief Parametric bootstrap test of H0: RR = 1.
 *
 * Replicates are drawn from the fitted GEV along the observed covariate history
 * and refitted. The interval is the percentile interval of log RR; the P-value
 * is the smallest two-sided level at which that interval excludes 0 (log RR = 0).
 * Replicates whose refit fails are dropped and counted.
 *
 * @throws Error(TooFewReplicates) below 500 replicates.
 * @throws Error(NonConvergence) if more than 10% of replicates fail.
 */
[[nodiscard]] RiskRatio test_rr_one(const Dataset& dataset, const Scenario& factual, const Scenario& counterfactual,
                                    double threshold, const RiskRatioTestOptions& options = {});

}  // namespace gca
