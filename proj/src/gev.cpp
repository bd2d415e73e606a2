#include "gca/gev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gca/error.hpp"

namespace gca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinShape = -0.5;

// log(1 + shape z) / shape, continuous through shape = 0.
double reduced_log(double z, double shape) {
    const double x = shape * z;
    return x == 0.0 ? z : z * std::log1p(x) / x;
}

// [x/(1+x) - log1p(x)] / x^2, with its Taylor series near 0.
double shape_kernel(double x) {
    if (std::fabs(x) < 0.05) {
        double sum = 0.0;
        double power = 1.0;
        for (int k = 0; k < 16; ++k) {
            const double term = (k % 2 == 0 ? -1.0 : 1.0) * (k + 1.0) / (k + 2.0) * power;
            sum += term;
            power *= x;
        }
        return sum;
    }
    return (x / (1.0 + x) - std::log1p(x)) / (x * x);
}

}  // namespace

double gumbel_cdf(double y, double location, double scale) {
    return std::exp(-std::exp(-(y - location) / scale));
}

double gumbel_survival(double y, double location, double scale) {
    return -std::expm1(-std::exp(-(y - location) / scale));
}

double gumbel_quantile(double prob, double location, double scale) {
    return location - scale * std::log(-std::log(prob));
}

double gumbel_logpdf(double y, double location, double scale) {
    const double z = (y - location) / scale;
    return -std::log(scale) - z - std::exp(-z);
}

bool in_support(double y, const GevParams& p) noexcept {
    return 1.0 + p.shape * (y - p.location) / p.scale > 0.0;
}

double gev_cdf(double y, const GevParams& p) {
    if (p.shape == 0.0) return gumbel_cdf(y, p.location, p.scale);
    const double z = (y - p.location) / p.scale;
    if (1.0 + p.shape * z <= 0.0) return p.shape > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::exp(-std::log1p(p.shape * z) / p.shape));
}

double gev_survival(double y, const GevParams& p) {
    if (p.shape == 0.0) return gumbel_survival(y, p.location, p.scale);
    const double z = (y - p.location) / p.scale;
    if (1.0 + p.shape * z <= 0.0) return p.shape > 0.0 ? 1.0 : 0.0;
    return -std::expm1(-std::exp(-std::log1p(p.shape * z) / p.shape));
}

double gev_quantile(double prob, const GevParams& p) {
    if (!(prob > 0.0 && prob < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability must lie in (0, 1)");
    if (p.shape == 0.0) return gumbel_quantile(prob, p.location, p.scale);
    const double g = std::log(-std::log(prob));
    return p.location + p.scale * std::expm1(-p.shape * g) / p.shape;
}

double gev_logpdf(double y, const GevParams& p) {
    if (p.shape == 0.0) return gumbel_logpdf(y, p.location, p.scale);
    const double z = (y - p.location) / p.scale;
    const double t = 1.0 + p.shape * z;
    if (t <= 0.0) return -kInf;
    const double l = std::log1p(p.shape * z) / p.shape;
    return -std::log(p.scale) - std::log(t) - l - std::exp(-l);
}

double GevFit::coefficient(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return location_coefficients(static_cast<Eigen::Index>(j));
    }
    throw Error(ErrorCode::UnknownCoefficient, "GEV fit has no location coefficient '" + name + "'");
}

double gev_negloglik(const Eigen::MatrixXd& x, std::span<const double> y, const Eigen::VectorXd& theta,
                     Eigen::VectorXd* gradient) {
    const Eigen::Index p = x.cols();
    const double log_scale = theta(p);
    const double scale = std::exp(log_scale);
    const double shape = theta(p + 1);
    const Eigen::VectorXd mu = x * theta.head(p);

    double nll = 0.0;
    Eigen::VectorXd d_mu;
    double d_log_scale = 0.0;
    double d_shape = 0.0;
    if (gradient) d_mu.resize(static_cast<Eigen::Index>(y.size()));

    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double z = (y[i] - mu(ii)) / scale;
        const double xz = shape * z;
        const double t = 1.0 + xz;
        if (!(t > 0.0)) return kInf;
        const double l = reduced_log(z, shape);
        const double w = std::exp(-l);
        nll += log_scale + std::log1p(xz) + l + w;
        if (gradient) {
            const double common = (w - (1.0 + shape)) / t;
            d_mu(ii) = common / scale;
            d_log_scale += 1.0 + z * common;
            d_shape += z / t + z * z * shape_kernel(xz) * (1.0 - w);
        }
    }
    if (gradient) {
        gradient->resize(p + 2);
        gradient->head(p) = x.transpose() * d_mu;
        (*gradient)(p) = d_log_scale;
        (*gradient)(p + 1) = d_shape;
    }
    return nll;
}

namespace {

struct Pwm {
    double location;
    double scale;
    double shape;
};

// Hosking, Wallis and Wood probability-weighted-moment estimator.
Pwm pwm_estimate(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(v.size());
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const auto jj = static_cast<double>(j);
        b0 += v[j];
        b1 += jj / (n - 1.0) * v[j];
        b2 += jj * (jj - 1.0) / ((n - 1.0) * (n - 2.0)) * v[j];
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;
    const double l2 = 2.0 * b1 - b0;
    const double denom = 3.0 * b2 - b0;
    double k = 0.0;
    if (denom != 0.0) {
        const double c = l2 / denom - std::log(2.0) / std::log(3.0);
        k = 7.8590 * c + 2.9554 * c * c;
    }
    k = std::clamp(k, -0.5, 0.4);
    if (std::fabs(k) < 1e-6) {
        const double scale = l2 / std::numbers::ln2;
        return {b0 - std::numbers::egamma * scale, scale, 0.0};
    }
    const double g = std::tgamma(1.0 + k);
    const double scale = l2 * k / (g * (1.0 - std::pow(2.0, -k)));
    return {b0 + scale * (g - 1.0) / k, scale, -k};
}

Eigen::MatrixXd numeric_hessian(const Eigen::MatrixXd& x, std::span<const double> y, const Eigen::VectorXd& theta) {
    const Eigen::Index d = theta.size();
    Eigen::MatrixXd h(d, d);
    Eigen::VectorXd gp;
    Eigen::VectorXd gm;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double step = 1e-5 * std::max(1.0, std::fabs(theta(j)));
        Eigen::VectorXd tp = theta;
        Eigen::VectorXd tm = theta;
        tp(j) += step;
        tm(j) -= step;
        const double fp = gev_negloglik(x, y, tp, &gp);
        const double fm = gev_negloglik(x, y, tm, &gm);
        if (std::isfinite(fp) && std::isfinite(fm)) {
            h.col(j) = (gp - gm) / (2.0 * step);
        } else {
            Eigen::VectorXd g0;
            (void)gev_negloglik(x, y, theta, &g0);
            h.col(j) = std::isfinite(fp) ? Eigen::VectorXd((gp - g0) / step) : Eigen::VectorXd((g0 - gm) / step);
        }
    }
    return 0.5 * (h + h.transpose());
}

bool feasible(const Eigen::VectorXd& theta) { return theta(theta.size() - 1) > kMinShape; }

}  // namespace

GevFit gev_fit_design(const Eigen::MatrixXd& x, std::vector<std::string> names, std::span<const double> y,
                      const GevOptions& options) {
    const auto n = y.size();
    if (static_cast<Eigen::Index>(n) != x.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "response length differs from the location design");
    }
    if (static_cast<Eigen::Index>(names.size()) != x.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "one name is needed per location column");
    }
    if (n < options.min_n) {
        throw Error(ErrorCode::InsufficientData,
                    "GEV fit needs at least " + std::to_string(options.min_n) + " rows, got " + std::to_string(n));
    }
    const Eigen::Index p = x.cols();
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));

    // Starting values: PWM on least-squares residuals, carried back into the intercept direction.
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::VectorXd beta0 = qr.solve(yv);
    const Eigen::VectorXd resid = yv - x * beta0;
    const Pwm start = pwm_estimate(std::vector<double>(resid.data(), resid.data() + resid.size()));
    const Eigen::VectorXd unit_direction = qr.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));

    Eigen::VectorXd theta(p + 2);
    theta.head(p) = beta0 + start.location * unit_direction;
    double scale0 = start.scale;
    if (!(scale0 > 0.0) || !std::isfinite(scale0)) {
        scale0 = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    }
    if (!(scale0 > 0.0)) throw Error(ErrorCode::NonConvergence, "response has no spread around its location");
    theta(p) = std::log(scale0);
    theta(p + 1) = start.shape;

    Eigen::VectorXd grad;
    double f = gev_negloglik(x, y, theta, &grad);
    for (int k = 0; k < 60 && !std::isfinite(f); ++k) {
        theta(p + 1) *= 0.5;
        if (k == 59) theta(p + 1) = 0.0;
        f = gev_negloglik(x, y, theta, &grad);
    }
    if (!std::isfinite(f)) throw Error(ErrorCode::SupportViolation, "no feasible GEV starting point");

    GevFit fit;
    fit.names = std::move(names);
    fit.n = n;
    fit.start_log_likelihood = -f;

    const double nd = static_cast<double>(n);
    bool converged = false;
    int iter = 0;
    Eigen::MatrixXd hessian;
    for (; iter < options.max_iterations; ++iter) {
        if (grad.norm() / nd < options.tolerance) {
            converged = true;
            break;
        }
        hessian = numeric_hessian(x, y, theta);
        const Eigen::VectorXd diag = hessian.diagonal().cwiseAbs().cwiseMax(1e-12);
        bool accepted = false;
        double lambda = 0.0;
        for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
            const Eigen::MatrixXd a = hessian + lambda * Eigen::MatrixXd(diag.asDiagonal());
            const Eigen::LLT<Eigen::MatrixXd> llt(a);
            if (llt.info() != Eigen::Success) {
                lambda = lambda == 0.0 ? 1e-6 : lambda * 10.0;
                continue;
            }
            const Eigen::VectorXd step = -llt.solve(grad);
            const double slope = grad.dot(step);
            double alpha = 1.0;
            for (int half = 0; half < 40; ++half, alpha *= 0.5) {
                const Eigen::VectorXd cand = theta + alpha * step;
                if (!feasible(cand)) continue;
                Eigen::VectorXd cand_grad;
                const double fc = gev_negloglik(x, y, cand, &cand_grad);
                if (!std::isfinite(fc)) continue;
                const bool armijo = fc <= f + 1e-4 * alpha * slope;
                const bool flat = std::fabs(fc - f) <= 1e-13 * std::max(1.0, std::fabs(f)) &&
                                  cand_grad.norm() < grad.norm();
                if (armijo || flat) {
                    theta = cand;
                    f = fc;
                    grad = cand_grad;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) lambda = lambda == 0.0 ? 1e-6 : lambda * 10.0;
        }
        if (!accepted) break;
    }
    if (!converged) {
        throw Error(ErrorCode::NonConvergence, "GEV likelihood gradient norm " + std::to_string(grad.norm() / nd) +
                                                   " after " + std::to_string(iter) + " iterations");
    }

    fit.location_coefficients = theta.head(p);
    fit.scale = std::exp(theta(p));
    fit.shape = theta(p + 1);
    fit.log_likelihood = -f;
    fit.iterations = iter;

    hessian = numeric_hessian(x, y, theta);
    Eigen::MatrixXd cov_theta = hessian.ldlt().solve(Eigen::MatrixXd::Identity(p + 2, p + 2));
    Eigen::VectorXd jac = Eigen::VectorXd::Ones(p + 2);
    jac(p) = fit.scale;
    fit.covariance = jac.asDiagonal() * cov_theta * jac.asDiagonal();
    return fit;
}

}  // namespace gca
