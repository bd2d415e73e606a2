#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gca {

inline constexpr std::string_view kInterceptName = "intercept";

/// Default ceiling on the (column-equilibrated) condition number of a design.
inline constexpr double kDefaultMaxCondition = 1e8;

/**
 * @brief Named regressor columns for least squares.
 *
 * The intercept is never implicit: it is present only if the caller adds it
 * with `add_intercept()` (it becomes the first column).
 */
class DesignMatrix {
public:
    DesignMatrix() = default;
    /// @throws Error(DimensionMismatch) if the name count differs from the column count.
    DesignMatrix(std::vector<std::string> names, Eigen::MatrixXd columns);

    /// Builds a design from equal-length column vectors.
    static DesignMatrix from_columns(std::vector<std::string> names, const std::vector<std::vector<double>>& columns);

    [[nodiscard]] DesignMatrix add_intercept() const;
    /// Copy without the named columns; unknown names are an error.
    [[nodiscard]] DesignMatrix without(std::span<const std::string> names) const;

    [[nodiscard]] Eigen::Index rows() const noexcept { return x_.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept { return x_.cols(); }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return x_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] bool has_intercept() const noexcept;
    [[nodiscard]] std::optional<Eigen::Index> index_of(std::string_view name) const noexcept;

    /// Ratio of extreme singular values after scaling every non-zero column to
    /// unit norm. Columns that are identically zero are ignored. Infinity when
    /// the remaining columns are rank deficient.
    [[nodiscard]] double condition_number() const;
    [[nodiscard]] bool ill_conditioned(double max_condition = kDefaultMaxCondition) const {
        return condition_number() > max_condition;
    }

private:
    std::vector<std::string> names_;
    Eigen::MatrixXd x_;
};

/**
 * @brief Least-squares fit with the quantities needed for small-sample inference.
 *
 * Columns of the design that are identically zero carry no information; they
 * are reported with a zero coefficient and NaN standard error, and do not
 * consume residual degrees of freedom.
 */
struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd covariance;  ///< residual_sd^2 (X'X)^-1 over the active columns
    std::vector<bool> active;
    bool has_intercept = false;
    double residual_sd = 0.0;
    double rss = 0.0;
    double r_squared = 0.0;
    int dof = 0;  ///< n minus the number of active columns
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    Eigen::VectorXd response;

    [[nodiscard]] Eigen::Index rows() const noexcept { return residuals.size(); }
    [[nodiscard]] int active_columns() const noexcept;
    /// @throws Error(UnknownCoefficient)
    [[nodiscard]] Eigen::Index index_of(std::string_view name) const;
    [[nodiscard]] double coefficient(std::string_view name) const;
    [[nodiscard]] double std_error(std::string_view name) const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::string null_description;
    std::optional<double> dof_numerator;
    std::optional<double> dof_denominator;
};

struct OlsOptions {
    double max_condition = kDefaultMaxCondition;
};

/**
 * @brief Ordinary least squares via column-pivoted Householder QR.
 *
 * @throws Error(DimensionMismatch) if y and the design disagree in length.
 * @throws Error(InsufficientData) if fewer than one residual degree of freedom remains.
 * @throws Error(IllConditioned) if the design's condition number exceeds the threshold.
 */
[[nodiscard]] FitResult ols_fit(const DesignMatrix& design, std::span<const double> y, const OlsOptions& options = {});

/// Student-t interval beta +- t_{dof,(1+level)/2} se.
[[nodiscard]] Interval coef_ci(const FitResult& fit, std::string_view name, double level);

/// Two-sided Student-t test of H0: beta = 0.
[[nodiscard]] TestResult t_test_zero(const FitResult& fit, std::string_view name);

/// Two-sided Student-t test of H0: beta = value.
[[nodiscard]] TestResult t_test_value(const FitResult& fit, std::string_view name, double value);

/**
 * @brief Nested-model F test, F = ((RSS_r - RSS_u)/q) / (RSS_u/dof_u).
 *
 * @throws Error(NotNested) unless reduced's columns are a strict subset of
 * full's and both were fitted to the same response.
 */
[[nodiscard]] TestResult f_test_nested(const FitResult& full, const FitResult& reduced);

// Distribution helpers shared by the other modules.

/// Two-sided p-value of a Student-t statistic. Handles infinite statistics.
[[nodiscard]] double student_t_two_sided_p(double t, double dof);
/// Quantile t_{dof}(prob).
[[nodiscard]] double student_t_quantile(double prob, double dof);
/// Upper-tail probability of F(d1, d2).
[[nodiscard]] double fisher_f_upper_p(double f, double d1, double d2);

}  // namespace gca
