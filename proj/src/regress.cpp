#include "gca/regress.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "gca/error.hpp"

namespace gca {

namespace {

bool column_is_zero(const Eigen::MatrixXd& x, Eigen::Index j) { return (x.col(j).array() == 0.0).all(); }

}  // namespace

DesignMatrix::DesignMatrix(std::vector<std::string> names, Eigen::MatrixXd columns)
    : names_(std::move(names)), x_(std::move(columns)) {
    if (static_cast<Eigen::Index>(names_.size()) != x_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(names_.size()) + " names for " +
                                                      std::to_string(x_.cols()) + " design columns");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        for (std::size_t j = i + 1; j < names_.size(); ++j) {
            if (names_[i] == names_[j]) throw Error(ErrorCode::InvalidArgument, "duplicate column '" + names_[i] + "'");
        }
    }
}

DesignMatrix DesignMatrix::from_columns(std::vector<std::string> names, const std::vector<std::vector<double>>& columns) {
    const Eigen::Index n = columns.empty() ? 0 : static_cast<Eigen::Index>(columns.front().size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (static_cast<Eigen::Index>(columns[j].size()) != n) {
            throw Error(ErrorCode::DimensionMismatch, "design columns differ in length");
        }
        x.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(columns[j].data(), n);
    }
    return DesignMatrix(std::move(names), std::move(x));
}

DesignMatrix DesignMatrix::add_intercept() const {
    if (has_intercept()) return *this;
    Eigen::MatrixXd x(x_.rows(), x_.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(x_.cols()) = x_;
    std::vector<std::string> names;
    names.reserve(names_.size() + 1);
    names.emplace_back(kInterceptName);
    names.insert(names.end(), names_.begin(), names_.end());
    return DesignMatrix(std::move(names), std::move(x));
}

DesignMatrix DesignMatrix::without(std::span<const std::string> drop) const {
    for (const auto& d : drop) {
        if (!index_of(d)) throw Error(ErrorCode::UnknownCoefficient, "design has no column '" + d + "'");
    }
    std::vector<std::string> names;
    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < names_.size(); ++j) {
        if (std::find(drop.begin(), drop.end(), names_[j]) == drop.end()) {
            names.push_back(names_[j]);
            keep.push_back(static_cast<Eigen::Index>(j));
        }
    }
    Eigen::MatrixXd x(x_.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = x_.col(keep[j]);
    return DesignMatrix(std::move(names), std::move(x));
}

bool DesignMatrix::has_intercept() const noexcept { return index_of(kInterceptName).has_value(); }

std::optional<Eigen::Index> DesignMatrix::index_of(std::string_view name) const noexcept {
    for (std::size_t j = 0; j < names_.size(); ++j) {
        if (names_[j] == name) return static_cast<Eigen::Index>(j);
    }
    return std::nullopt;
}

double DesignMatrix::condition_number() const {
    std::vector<Eigen::Index> nonzero;
    for (Eigen::Index j = 0; j < x_.cols(); ++j) {
        if (!column_is_zero(x_, j)) nonzero.push_back(j);
    }
    if (nonzero.empty()) return 1.0;
    const auto k = static_cast<Eigen::Index>(nonzero.size());
    if (x_.rows() < k) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd scaled(x_.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        scaled.col(j) = x_.col(nonzero[static_cast<std::size_t>(j)]);
        scaled.col(j) /= scaled.col(j).norm();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

int FitResult::active_columns() const noexcept {
    return static_cast<int>(std::count(active.begin(), active.end(), true));
}

Eigen::Index FitResult::index_of(std::string_view name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return static_cast<Eigen::Index>(j);
    }
    throw Error(ErrorCode::UnknownCoefficient, "fit has no coefficient '" + std::string(name) + "'");
}

double FitResult::coefficient(std::string_view name) const { return coefficients(index_of(name)); }

double FitResult::std_error(std::string_view name) const {
    const Eigen::Index j = index_of(name);
    return std::sqrt(covariance(j, j));
}

FitResult ols_fit(const DesignMatrix& design, std::span<const double> y, const OlsOptions& options) {
    const Eigen::Index n = design.rows();
    if (static_cast<Eigen::Index>(y.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "response has " + std::to_string(y.size()) + " rows, design has " + std::to_string(n));
    }
    const Eigen::MatrixXd& x = design.matrix();
    const Eigen::Index k = x.cols();

    std::vector<bool> active(static_cast<std::size_t>(k));
    std::vector<Eigen::Index> active_idx;
    for (Eigen::Index j = 0; j < k; ++j) {
        active[static_cast<std::size_t>(j)] = !column_is_zero(x, j);
        if (active[static_cast<std::size_t>(j)]) active_idx.push_back(j);
    }
    const auto ka = static_cast<Eigen::Index>(active_idx.size());
    const Eigen::Index dof = n - ka;
    if (dof < 1) {
        throw Error(ErrorCode::InsufficientData, std::to_string(n) + " observations for " + std::to_string(ka) +
                                                     " active columns leaves no residual degrees of freedom");
    }
    const double cond = design.condition_number();
    if (!(cond <= options.max_condition)) {
        throw Error(ErrorCode::IllConditioned, "design condition number " + std::to_string(cond) +
                                                   " exceeds " + std::to_string(options.max_condition) +
                                                   " (collinear columns?)");
    }

    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    Eigen::MatrixXd xa(n, ka);
    for (Eigen::Index j = 0; j < ka; ++j) xa.col(j) = x.col(active_idx[static_cast<std::size_t>(j)]);

    FitResult fit;
    fit.names = design.names();
    fit.active = active;
    fit.has_intercept = design.has_intercept();
    fit.coefficients = Eigen::VectorXd::Zero(k);
    fit.covariance = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
    fit.response = yv;
    fit.dof = static_cast<int>(dof);

    Eigen::MatrixXd inv_xtx;
    if (ka > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xa);
        const Eigen::VectorXd beta = qr.solve(yv);
        const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(ka, ka).triangularView<Eigen::Upper>();
        const Eigen::MatrixXd r_inv =
            r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(ka, ka));
        const auto& perm = qr.colsPermutation();
        inv_xtx = perm * (r_inv * r_inv.transpose()) * perm.transpose();
        for (Eigen::Index j = 0; j < ka; ++j) fit.coefficients(active_idx[static_cast<std::size_t>(j)]) = beta(j);
        fit.fitted = xa * beta;
    } else {
        fit.fitted = Eigen::VectorXd::Zero(n);
    }
    fit.residuals = yv - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    fit.residual_sd = std::sqrt(fit.rss / static_cast<double>(dof));

    const double s2 = fit.residual_sd * fit.residual_sd;
    for (Eigen::Index a = 0; a < ka; ++a) {
        for (Eigen::Index b = 0; b < ka; ++b) {
            fit.covariance(active_idx[static_cast<std::size_t>(a)], active_idx[static_cast<std::size_t>(b)]) =
                s2 * 0.5 * (inv_xtx(a, b) + inv_xtx(b, a));
        }
    }

    double tss = 0.0;
    if (fit.has_intercept) {
        tss = (yv.array() - yv.mean()).square().sum();
    } else {
        tss = yv.squaredNorm();
    }
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - fit.rss / tss, 0.0, 1.0) : 1.0;
    return fit;
}

double student_t_two_sided_p(double t, double dof) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    boost::math::students_t_distribution<double> dist(dof);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

double student_t_quantile(double prob, double dof) {
    boost::math::students_t_distribution<double> dist(dof);
    return boost::math::quantile(dist, prob);
}

double fisher_f_upper_p(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    boost::math::fisher_f_distribution<double> dist(d1, d2);
    return std::clamp(boost::math::cdf(boost::math::complement(dist, f)), 0.0, 1.0);
}

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0, 1), got " + std::to_string(level));
    }
}

}  // namespace

Interval coef_ci(const FitResult& fit, std::string_view name, double level) {
    check_level(level);
    const double beta = fit.coefficient(name);
    const double se = fit.std_error(name);
    if (std::isnan(se) || se == 0.0) return {beta, beta};
    const double half = student_t_quantile(0.5 * (1.0 + level), fit.dof) * se;
    return {beta - half, beta + half};
}

TestResult t_test_value(const FitResult& fit, std::string_view name, double value) {
    const double beta = fit.coefficient(name);
    const double se = fit.std_error(name);
    TestResult r;
    r.null_description = "H0: " + std::string(name) + " = " + std::to_string(value);
    r.dof_denominator = fit.dof;
    if (beta == value) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    if (std::isnan(se)) {
        r.statistic = std::numeric_limits<double>::quiet_NaN();
        r.p_value = 1.0;
        return r;
    }
    r.statistic = se > 0.0 ? (beta - value) / se : std::copysign(std::numeric_limits<double>::infinity(), beta - value);
    r.p_value = student_t_two_sided_p(r.statistic, fit.dof);
    return r;
}

TestResult t_test_zero(const FitResult& fit, std::string_view name) { return t_test_value(fit, name, 0.0); }

TestResult f_test_nested(const FitResult& full, const FitResult& reduced) {
    if (full.rows() != reduced.rows() || full.response != reduced.response) {
        throw Error(ErrorCode::NotNested, "models were fitted to different responses");
    }
    if (reduced.names.size() >= full.names.size()) {
        throw Error(ErrorCode::NotNested, "reduced model must have strictly fewer columns");
    }
    for (const auto& name : reduced.names) {
        if (std::find(full.names.begin(), full.names.end(), name) == full.names.end()) {
            throw Error(ErrorCode::NotNested, "reduced column '" + name + "' is not in the full model");
        }
    }

    TestResult r;
    r.null_description = "H0: the " + std::to_string(full.names.size() - reduced.names.size()) +
                         " additional coefficients are all zero";
    const int q = full.active_columns() - reduced.active_columns();
    r.dof_numerator = q;
    r.dof_denominator = full.dof;
    const double gap = std::max(0.0, reduced.rss - full.rss);
    if (q <= 0 || gap == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    if (full.rss == 0.0) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
    }
    r.statistic = (gap / q) / (full.rss / full.dof);
    r.p_value = fisher_f_upper_p(r.statistic, q, full.dof);
    return r;
}

}  // namespace gca
