#include "gca/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gca/error.hpp"

namespace gca {

const ScalingFactor& ScalingFactors::at(const std::string& name) const {
    for (const auto& f : factors) {
        if (f.name == name) return f;
    }
    throw Error(ErrorCode::UnknownCoefficient, "no scaling factor for '" + name + "'");
}

ScalingFactors of_fit(const FingerprintSet& set, double level, const OlsOptions& options) {
    if (set.fingerprints.empty()) throw Error(ErrorCode::InvalidArgument, "at least one fingerprint is required");
    if (set.fingerprints.size() > set.max_fingerprints) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(set.fingerprints.size()) +
                                                    " fingerprints exceed the configured maximum of " +
                                                    std::to_string(set.max_fingerprints));
    }
    if (set.names.size() != set.fingerprints.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one name is needed per fingerprint");
    }
    const auto n = static_cast<Eigen::Index>(set.observation.size());
    const auto k = static_cast<Eigen::Index>(set.fingerprints.size());
    Eigen::MatrixXd x(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto& f = set.fingerprints[static_cast<std::size_t>(j)];
        if (static_cast<Eigen::Index>(f.size()) != n) {
            throw Error(ErrorCode::DimensionMismatch,
                        "fingerprint '" + set.names[static_cast<std::size_t>(j)] + "' differs in length from the observation");
        }
        x.col(j) = Eigen::Map<const Eigen::VectorXd>(f.data(), n);
    }
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(set.observation.data(), n);

    if (set.prewhitening) {
        const Eigen::MatrixXd& p = *set.prewhitening;
        if (p.rows() != n || p.cols() != n) {
            throw Error(ErrorCode::DimensionMismatch, "prewhitening matrix must be n x n");
        }
        if (Eigen::FullPivLU<Eigen::MatrixXd>(p).rank() < n) {
            throw Error(ErrorCode::IllConditioned, "prewhitening matrix is singular");
        }
        x = p * x;
        y = p * y;
    }

    ScalingFactors out;
    out.level = level;
    out.fit = ols_fit(DesignMatrix(set.names, x), std::span<const double>(y.data(), static_cast<std::size_t>(n)), options);
    for (const auto& name : set.names) {
        ScalingFactor f;
        f.name = name;
        f.estimate = out.fit.coefficient(name);
        f.ci = coef_ci(out.fit, name, level);
        f.p_detection = t_test_zero(out.fit, name).p_value;
        f.p_attribution = t_test_value(out.fit, name, 1.0).p_value;
        f.detected = f.ci.lo > 0.0 || f.ci.hi < 0.0;
        // A noiseless fit collapses the interval onto the estimate, which carries rounding error.
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(f.estimate));
        f.attributed = f.detected && f.ci.lo - slack <= 1.0 && 1.0 <= f.ci.hi + slack;
        out.factors.push_back(f);
    }
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string of_compare_with_statcf(const ScalingFactors& of, const ChangeEstimate& change, const std::string& unit) {
    const bool cf_significant = change.p_value < 1.0 - change.level;
    std::ostringstream os;
    os << "Fingerprint regression (tests H0: beta = 0 for detection and H0: beta = 1 for attribution)\n";
    bool any_detected = false;
    for (const auto& f : of.factors) {
        any_detected = any_detected || f.detected;
        os << "  " << f.name << ": beta = " << fmt(f.estimate) << " (" << fmt(f.ci.lo) << ", " << fmt(f.ci.hi)
           << ") at " << fmt(100.0 * of.level) << "%, dimensionless; detected: " << (f.detected ? "yes" : "no")
           << "; attributed: " << (f.attributed ? "yes" : "no") << "\n";
    }
    os << "Statistical counterfactual (tests H0: delta = 0 only)\n";
    os << "  delta = " << fmt(change.delta) << " (" << fmt(change.ci.lo) << ", " << fmt(change.ci.hi) << ") at "
       << fmt(100.0 * change.level) << "%" << (unit.empty() ? "" : ", " + unit) << "; p = " << fmt(change.p_value)
       << "; significant: " << (cf_significant ? "yes" : "no") << "\n";
    os << "Detection: ";
    if (any_detected && cf_significant) {
        os << "concordant (both frameworks detect a change)\n";
    } else if (!any_detected && !cf_significant) {
        os << "concordant (neither framework detects a change)\n";
    } else {
        os << "discordant (" << (cf_significant ? "counterfactual significant, fingerprint not detected"
                                                : "fingerprint detected, counterfactual not significant")
           << ")\n";
    }
    os << "Estimates are on different scales and are not reconciled numerically.\n";
    return os.str();
}

}  // namespace gca
