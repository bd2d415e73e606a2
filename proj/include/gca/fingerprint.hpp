#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gca/regress.hpp"
#include "gca/statcf.hpp"

namespace gca {

/// Observation vector and the model-simulated response patterns it is regressed on.
struct FingerprintSet {
    std::vector<std::string> names;
    std::vector<std::vector<double>> fingerprints;
    std::vector<double> observation;
    /// Optional invertible n x n matrix applied to both sides before fitting.
    std::optional<Eigen::MatrixXd> prewhitening;
    std::size_t max_fingerprints = 2;
};

struct ScalingFactor {
    std::string name;
    double estimate = 0.0;
    Interval ci;
    double p_detection = 1.0;    ///< H0: beta = 0
    double p_attribution = 1.0;  ///< H0: beta = 1
    bool detected = false;       ///< interval excludes 0
    bool attributed = false;     ///< detected, and the interval contains 1
};

struct ScalingFactors {
    std::vector<ScalingFactor> factors;
    double level = 0.95;
    FitResult fit;

    /// @throws Error(UnknownCoefficient)
    [[nodiscard]] const ScalingFactor& at(const std::string& name) const;
};

/**
 * @brief Regression of the observation on the fingerprints without an intercept.
 *
 * @throws Error(DimensionMismatch) for unequal lengths or a wrongly sized prewhitening matrix.
 * @throws Error(InvalidArgument) for no fingerprints or more than `max_fingerprints`.
 * @throws Error(IllConditioned) for collinear fingerprints or a singular prewhitening matrix.
 */
[[nodiscard]] ScalingFactors of_fit(const FingerprintSet& set, double level = 0.95, const OlsOptions& options = {});

/// Plain-text side-by-side summary of a fingerprint analysis and a counterfactual change estimate.
[[nodiscard]] std::string of_compare_with_statcf(const ScalingFactors& of, const ChangeEstimate& change,
                                                 const std::string& unit = "");

}  // namespace gca
