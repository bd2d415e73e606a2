#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gca/regress.hpp"
#include "gca/timeseries.hpp"

namespace gca {

/// One-directional test of whether lags of `causes` help predict `target`
/// beyond lags of `target` and `conditioning`. All series use the same order.
struct VarSpec {
    int order = 1;
    std::string target;
    std::vector<std::string> causes;
    std::vector<std::string> conditioning;
    bool include_intercept = true;
};

struct LaggedDesign {
    DesignMatrix unrestricted;
    DesignMatrix restricted;
    std::vector<double> y;
    std::vector<Year> years;
    std::vector<std::string> cause_columns;  ///< the columns dropped from the restricted model
};

/// Name of the design column holding lag `lag` of `series`.
[[nodiscard]] std::string lag_column(const std::string& series, int lag);

/**
 * @brief Builds the unrestricted and restricted lagged regressions.
 *
 * Rows are t = p+1..T of the dataset. `first_row` (0-based) may move the
 * first row later so that fits of different orders share rows.
 *
 * @throws Error(InvalidArgument) for a malformed spec.
 * @throws Error(UnknownSeries) for names absent from the dataset.
 * @throws Error(InsufficientData) unless rows >= p + (number of non-target series) + 5
 * and at least one residual degree of freedom remains.
 */
[[nodiscard]] LaggedDesign build_lagged_design(const Dataset& dataset, const VarSpec& spec, std::size_t first_row = 0);

struct GcResult {
    double f_statistic = 0.0;
    double p_value = 1.0;
    double rss_unrestricted = 0.0;
    double rss_restricted = 0.0;
    int dof_numerator = 0;
    int dof_denominator = 0;
    double alpha = 0.05;
    bool reject = false;
    double gaussian_te = 0.0;  ///< nats
    FitResult unrestricted;
    FitResult restricted;
};

/// Fits both models and applies the nested F test at level `alpha`.
[[nodiscard]] GcResult gc_test(const Dataset& dataset, const VarSpec& spec, double alpha = 0.05,
                               const OlsOptions& options = {});

/**
 * @brief Gaussian transfer entropy 0.5 ln(rss_restricted / rss_unrestricted), in nats.
 * @throws Error(InvalidRss) unless both are positive and restricted >= unrestricted.
 */
[[nodiscard]] double gaussian_transfer_entropy(double rss_restricted, double rss_unrestricted);

enum class InformationCriterion { Aic, Bic };

/// Order in 1..p_max minimising the criterion of the unrestricted model, all
/// orders fitted on the rows available at p_max.
[[nodiscard]] int select_order(const Dataset& dataset, VarSpec spec, int p_max, InformationCriterion criterion,
                               const OlsOptions& options = {});

}  // namespace gca
