#pragma once

#include <Eigen/Dense>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace gca {

/// Location, scale and shape of a generalized extreme value distribution.
/// shape > 0 is Frechet-type (heavy upper tail), shape < 0 Weibull-type (bounded above).
struct GevParams {
    double location = 0.0;
    double scale = 1.0;
    double shape = 0.0;
};

// Gumbel (shape exactly zero) closed forms.
[[nodiscard]] double gumbel_cdf(double y, double location, double scale);
[[nodiscard]] double gumbel_survival(double y, double location, double scale);
[[nodiscard]] double gumbel_quantile(double prob, double location, double scale);
[[nodiscard]] double gumbel_logpdf(double y, double location, double scale);

// General forms. They switch to the Gumbel expressions only when shape == 0 exactly.
// Outside the support the CDF is 0 or 1 and the log density is -infinity.
[[nodiscard]] double gev_cdf(double y, const GevParams& p);
/// 1 - cdf, computed without cancellation in the upper tail.
[[nodiscard]] double gev_survival(double y, const GevParams& p);
/// Inverse CDF for prob in (0, 1).
[[nodiscard]] double gev_quantile(double prob, const GevParams& p);
[[nodiscard]] double gev_logpdf(double y, const GevParams& p);

/// True if 1 + shape (y - location) / scale > 0.
[[nodiscard]] bool in_support(double y, const GevParams& p) noexcept;

/// Draws one variate by inversion.
template <class Engine>
double gev_sample(Engine& rng, const GevParams& p) {
    // Open interval so that the quantile is always finite.
    double u = 0.0;
    do {
        u = std::generate_canonical<double, 53>(rng);
    } while (u <= 0.0 || u >= 1.0);
    return gev_quantile(u, p);
}

struct GevOptions {
    std::size_t min_n = 20;
    /// Convergence when the gradient of the mean negative log-likelihood has Euclidean norm below this.
    double tolerance = 1e-8;
    int max_iterations = 500;
};

/**
 * @brief Maximum-likelihood GEV fit with location linear in covariates.
 *
 * mu(t) = sum_j beta_j x_j(t); scale and shape are constant. The covariance is
 * the inverse observed information over (beta, scale, shape).
 */
struct GevFit {
    std::vector<std::string> names;  ///< location coefficient names, intercept first
    Eigen::VectorXd location_coefficients;
    double scale = 1.0;
    double shape = 0.0;
    double log_likelihood = 0.0;
    double start_log_likelihood = 0.0;  ///< at the probability-weighted-moment starting point
    Eigen::MatrixXd covariance;
    int iterations = 0;
    std::size_t n = 0;

    /// Location coefficient by name. @throws Error(UnknownCoefficient)
    [[nodiscard]] double coefficient(const std::string& name) const;
    [[nodiscard]] GevParams params_at(double location) const { return {location, scale, shape}; }
};

/**
 * @brief Fits a GEV by damped Newton iterations from probability-weighted-moment
 * starting values computed on least-squares detrended data.
 *
 * `x` holds the location design (first column typically all ones).
 *
 * @throws Error(InsufficientData) below `min_n` rows.
 * @throws Error(NonConvergence) if the gradient criterion is not met.
 * @throws Error(SupportViolation) if no feasible starting point exists.
 */
[[nodiscard]] GevFit gev_fit_design(const Eigen::MatrixXd& x, std::vector<std::string> names, std::span<const double> y,
                                    const GevOptions& options = {});

/// Negative log-likelihood and its gradient in (beta, log scale, shape); +infinity outside the support.
[[nodiscard]] double gev_negloglik(const Eigen::MatrixXd& x, std::span<const double> y, const Eigen::VectorXd& theta,
                                   Eigen::VectorXd* gradient = nullptr);

}  // namespace gca
