#include "gca/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gca/error.hpp"
#include "gca/random.hpp"

namespace gca {

namespace {

Eigen::MatrixXd location_design(const Dataset& dataset) {
    const auto n = static_cast<Eigen::Index>(dataset.rows());
    const auto& covs = dataset.covariates();
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(covs.size()) + 1);
    x.col(0).setOnes();
    for (std::size_t j = 0; j < covs.size(); ++j) {
        const auto v = covs[j].series.values();
        x.col(static_cast<Eigen::Index>(j) + 1) = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    }
    return x;
}

std::vector<std::string> location_names(const Dataset& dataset) {
    std::vector<std::string> names{std::string(kInterceptName)};
    for (auto& name : dataset.covariate_names()) names.push_back(std::move(name));
    return names;
}

double log_risk_ratio(const GevFit& fit, const Scenario& factual, const Scenario& counterfactual, double threshold) {
    const double pf = exceedance_prob(fit, factual, threshold);
    const double pc = exceedance_prob(fit, counterfactual, threshold);
    return std::log(pf) - std::log(pc);
}

}  // namespace

GevFit gev_fit(const Dataset& dataset, const GevOptions& options) {
    return gev_fit_design(location_design(dataset), location_names(dataset), dataset.response().values(), options);
}

double location_at(const GevFit& fit, const Scenario& s) {
    double mu = 0.0;
    std::size_t matched = 0;
    for (std::size_t j = 0; j < fit.names.size(); ++j) {
        const double coef = fit.location_coefficients(static_cast<Eigen::Index>(j));
        if (fit.names[j] == kInterceptName) {
            mu += coef;
            continue;
        }
        auto it = s.assignment.find(fit.names[j]);
        if (it == s.assignment.end()) {
            throw Error(ErrorCode::IncompleteScenario,
                        "scenario '" + s.name + "' assigns no value to '" + fit.names[j] + "'");
        }
        mu += coef * it->second;
        ++matched;
    }
    if (matched != s.assignment.size()) {
        throw Error(ErrorCode::IncompleteScenario, "scenario '" + s.name + "' assigns covariates the fit lacks");
    }
    return mu;
}

double return_level(const GevFit& fit, const Scenario& s, double period) {
    if (!(period > 1.0) || !std::isfinite(period)) {
        throw Error(ErrorCode::InvalidPeriod, "return period must be a finite number above 1");
    }
    return gev_quantile(1.0 - 1.0 / period, fit.params_at(location_at(fit, s)));
}

double exceedance_prob(const GevFit& fit, const Scenario& s, double threshold) {
    return gev_survival(threshold, fit.params_at(location_at(fit, s)));
}

RiskRatio risk_ratio(const GevFit& fit, const Scenario& factual, const Scenario& counterfactual, double threshold) {
    RiskRatio rr;
    rr.p_factual = exceedance_prob(fit, factual, threshold);
    rr.p_counterfactual = exceedance_prob(fit, counterfactual, threshold);
    if (rr.p_counterfactual < 1e-300) {
        throw Error(ErrorCode::ZeroDenominator, "counterfactual exceedance probability is effectively zero");
    }
    rr.value = rr.p_factual / rr.p_counterfactual;
    rr.ci = {rr.value, rr.value};
    return rr;
}

RiskRatio test_rr_one(const Dataset& dataset, const Scenario& factual, const Scenario& counterfactual,
                      double threshold, const RiskRatioTestOptions& options) {
    if (options.replicates < 500) {
        throw Error(ErrorCode::TooFewReplicates,
                    "risk-ratio test needs at least 500 replicates, got " + std::to_string(options.replicates));
    }
    if (!(options.level > 0.0 && options.level < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
    }
    const Eigen::MatrixXd x = location_design(dataset);
    const std::vector<std::string> names = location_names(dataset);
    const GevFit fit = gev_fit_design(x, names, dataset.response().values(), options.gev);
    RiskRatio rr = risk_ratio(fit, factual, counterfactual, threshold);
    rr.level = options.level;

    const Eigen::VectorXd mu = x * fit.location_coefficients;
    const auto n = static_cast<std::size_t>(x.rows());
    const auto draws = parallel_map<std::optional<double>>(
        static_cast<std::size_t>(options.replicates), [&](std::size_t i) -> std::optional<double> {
            Rng rng = replicate_rng(options.seed, i);
            std::vector<double> y(n);
            for (std::size_t t = 0; t < n; ++t) {
                y[t] = gev_sample(rng, fit.params_at(mu(static_cast<Eigen::Index>(t))));
            }
            try {
                const GevFit refit = gev_fit_design(x, names, y, options.gev);
                const double v = log_risk_ratio(refit, factual, counterfactual, threshold);
                if (!std::isfinite(v)) return std::nullopt;
                return v;
            } catch (const Error& e) {
                if (!is_numerical(e.code())) throw;
                return std::nullopt;
            }
        });

    std::vector<double> logs;
    logs.reserve(draws.size());
    for (const auto& d : draws) {
        if (d) logs.push_back(*d);
    }
    rr.replicates_used = logs.size();
    rr.replicates_failed = draws.size() - logs.size();
    if (rr.replicates_failed * 10 > draws.size()) {
        throw Error(ErrorCode::NonConvergence, std::to_string(rr.replicates_failed) + " of " +
                                                   std::to_string(draws.size()) + " bootstrap refits failed");
    }

    std::size_t below = 0;
    std::size_t above = 0;
    for (double v : logs) {
        below += v <= 0.0 ? 1 : 0;
        above += v >= 0.0 ? 1 : 0;
    }
    const auto b = static_cast<double>(logs.size());
    rr.p_value_rr1 = std::min(1.0, 2.0 * static_cast<double>(std::min(below, above)) / b);

    std::sort(logs.begin(), logs.end());
    const double tail = 0.5 * (1.0 - options.level);
    rr.ci = {std::exp(sorted_quantile(logs, tail)), std::exp(sorted_quantile(logs, 1.0 - tail))};
    return rr;
}

}  // namespace gca
