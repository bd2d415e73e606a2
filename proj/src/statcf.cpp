#include "gca/statcf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gca/error.hpp"
#include "gca/random.hpp"

namespace gca {

CounterfactualModel::CounterfactualModel(Dataset dataset, bool include_intercept, DesignMatrix design, FitResult fit)
    : dataset_(std::move(dataset)),
      include_intercept_(include_intercept),
      design_(std::move(design)),
      fit_(std::move(fit)) {}

double CounterfactualModel::intercept() const {
    return include_intercept_ ? fit_.coefficient(kInterceptName) : 0.0;
}

CounterfactualModel fit_statcf(const Dataset& dataset, bool include_intercept, const OlsOptions& options) {
    if (dataset.covariates().empty()) {
        throw Error(ErrorCode::InvalidArgument, "statistical counterfactual needs at least one covariate");
    }
    std::vector<std::vector<double>> columns;
    for (const auto& c : dataset.covariates()) {
        columns.emplace_back(c.series.values().begin(), c.series.values().end());
    }
    DesignMatrix design = DesignMatrix::from_columns(dataset.covariate_names(), columns);
    if (include_intercept) design = design.add_intercept();
    FitResult fit = ols_fit(design, dataset.response().values(), options);
    return CounterfactualModel(dataset, include_intercept, std::move(design), std::move(fit));
}

namespace {

/// Covariate values of `s` laid out in design-column order (0 for the intercept).
Eigen::VectorXd scenario_vector(const CounterfactualModel& model, const Scenario& s, double intercept_value) {
    const auto& names = model.fit().names;
    Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
    std::size_t matched = 0;
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == kInterceptName) {
            v(static_cast<Eigen::Index>(j)) = intercept_value;
            continue;
        }
        auto it = s.assignment.find(names[j]);
        if (it == s.assignment.end()) {
            throw Error(ErrorCode::IncompleteScenario, "scenario '" + s.name + "' assigns no value to '" + names[j] + "'");
        }
        v(static_cast<Eigen::Index>(j)) = it->second;
        ++matched;
    }
    if (matched != s.assignment.size()) {
        throw Error(ErrorCode::IncompleteScenario, "scenario '" + s.name + "' assigns covariates the model lacks");
    }
    return v;
}

double linear_combination(const FitResult& fit, const Eigen::VectorXd& c) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        if (fit.active[static_cast<std::size_t>(j)]) sum += fit.coefficients(j) * c(j);
    }
    return sum;
}

double combination_variance(const FitResult& fit, const Eigen::VectorXd& c) {
    double var = 0.0;
    for (Eigen::Index a = 0; a < c.size(); ++a) {
        if (!fit.active[static_cast<std::size_t>(a)] || c(a) == 0.0) continue;
        for (Eigen::Index b = 0; b < c.size(); ++b) {
            if (!fit.active[static_cast<std::size_t>(b)] || c(b) == 0.0) continue;
            var += c(a) * fit.covariance(a, b) * c(b);
        }
    }
    return std::max(0.0, var);
}

}  // namespace

double scenario_mean(const CounterfactualModel& model, const Scenario& s) {
    return linear_combination(model.fit(), scenario_vector(model, s, 1.0));
}

std::string anthropogenic_covariate(const Dataset& dataset, const ScenarioWindows& windows) {
    if (!windows.anthropogenic.empty()) {
        for (const auto& c : dataset.covariates()) {
            if (c.series.name() == windows.anthropogenic) return windows.anthropogenic;
        }
        throw Error(ErrorCode::UnknownSeries, "no covariate named '" + windows.anthropogenic + "'");
    }
    for (const auto& c : dataset.covariates()) {
        if (c.role == CovariateRole::Forced) return c.series.name();
    }
    throw Error(ErrorCode::InvalidArgument, "dataset has no forced covariate to treat as anthropogenic");
}

std::pair<Scenario, Scenario> make_pi_pd_scenarios(const Dataset& dataset, const ScenarioWindows& windows) {
    const std::string ant = anthropogenic_covariate(dataset, windows);
    const auto [first, last] = dataset.span();
    if (windows.pd_year < first || windows.pd_year > last) {
        throw Error(ErrorCode::WindowOutOfRange, "present-day year " + std::to_string(windows.pd_year) +
                                                     " outside data span");
    }
    Scenario pi{"PI", {}};
    Scenario pd{"PD", {}};
    for (const auto& c : dataset.covariates()) {
        const auto& s = c.series;
        if (s.name() == ant) {
            pi.assignment[s.name()] = climatological_mean(s, windows.pi_first, windows.pi_last);
            pd.assignment[s.name()] = s.at(windows.pd_year);
        } else {
            const double clim = climatological_mean(s, first, last);
            pi.assignment[s.name()] = clim;
            pd.assignment[s.name()] = clim;
        }
    }
    return {pi, pd};
}

ChangeEstimate delta(const CounterfactualModel& model, const Scenario& s1, const Scenario& s2, double level) {
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
    const FitResult& fit = model.fit();
    const Eigen::VectorXd c = scenario_vector(model, s2, 0.0) - scenario_vector(model, s1, 0.0);

    ChangeEstimate est;
    est.level = level;
    est.method = InferenceMethod::Analytic;
    est.delta = linear_combination(fit, c);
    est.std_error = std::sqrt(combination_variance(fit, c));
    if (est.std_error == 0.0) {
        est.ci = {est.delta, est.delta};
        est.p_value = est.delta == 0.0 ? 1.0 : 0.0;
        return est;
    }
    const double half = student_t_quantile(0.5 * (1.0 + level), fit.dof) * est.std_error;
    est.ci = {est.delta - half, est.delta + half};
    est.p_value = student_t_two_sided_p(est.delta / est.std_error, fit.dof);
    return est;
}

namespace {

ChangeEstimate rescaled(const FitResult& fit, const std::string& name, double factor, double level) {
    const double beta = fit.coefficient(name);
    const Interval ci = coef_ci(fit, name, level);
    ChangeEstimate est;
    est.level = level;
    est.delta = beta * factor;
    const double a = ci.lo * factor;
    const double b = ci.hi * factor;
    est.ci = {std::min(a, b), std::max(a, b)};
    est.std_error = fit.std_error(name) * std::fabs(factor);
    est.p_value = t_test_zero(fit, name).p_value;
    return est;
}

}  // namespace

std::map<std::string, ChangeEstimate> factor_deltas(const CounterfactualModel& model, const AuxiliarySeries& auxiliary,
                                                    const ScenarioWindows& windows, double level) {
    if (auxiliary.empty()) {
        throw Error(ErrorCode::MissingAuxiliarySeries,
                    "factor decomposition needs the components of the anthropogenic covariate");
    }
    const Dataset& data = model.dataset();
    const std::string ant = anthropogenic_covariate(data, windows);
    std::map<std::string, ChangeEstimate> out;
    for (const auto& aux : auxiliary) {
        const double change = aux.at(windows.pd_year) - climatological_mean(aux, windows.pi_first, windows.pi_last);
        out[aux.name()] = rescaled(model.fit(), ant, change, level);
    }
    for (const auto& c : data.covariates()) {
        if (c.series.name() == ant) continue;
        const auto [lo, hi] = series_range(c.series);
        out[c.series.name()] = rescaled(model.fit(), c.series.name(), hi - lo, level);
    }
    return out;
}

std::vector<double> bootstrap_delta_draws(const CounterfactualModel& model, const Scenario& s1, const Scenario& s2,
                                          const BootstrapOptions& options) {
    if (options.replicates < 200) {
        throw Error(ErrorCode::TooFewReplicates,
                    "bootstrap needs at least 200 replicates, got " + std::to_string(options.replicates));
    }
    const FitResult& fit = model.fit();
    const Eigen::VectorXd c = scenario_vector(model, s2, 0.0) - scenario_vector(model, s1, 0.0);
    const auto n = static_cast<std::size_t>(fit.rows());

    return parallel_map<double>(static_cast<std::size_t>(options.replicates), [&](std::size_t i) {
        if ((c.array() == 0.0).all()) return 0.0;
        Rng rng = replicate_rng(options.seed, i);
        std::normal_distribution<double> noise(0.0, fit.residual_sd);
        std::vector<double> y(n);
        for (std::size_t t = 0; t < n; ++t) y[t] = fit.fitted(static_cast<Eigen::Index>(t)) + noise(rng);
        const FitResult refit = ols_fit(model.design(), y, OlsOptions{std::numeric_limits<double>::infinity()});
        return linear_combination(refit, c);
    });
}

ChangeEstimate bootstrap_delta(const CounterfactualModel& model, const Scenario& s1, const Scenario& s2,
                               const BootstrapOptions& options) {
    if (!(options.level > 0.0 && options.level < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
    }
    std::vector<double> draws = bootstrap_delta_draws(model, s1, s2, options);
    const auto b = static_cast<double>(draws.size());

    ChangeEstimate est;
    est.method = InferenceMethod::Bootstrap;
    est.level = options.level;
    est.delta = delta(model, s1, s2, options.level).delta;

    std::size_t below = 0;
    std::size_t above = 0;
    double mean = 0.0;
    for (double d : draws) {
        below += d <= 0.0 ? 1 : 0;
        above += d >= 0.0 ? 1 : 0;
        mean += d;
    }
    mean /= b;
    double ss = 0.0;
    for (double d : draws) ss += (d - mean) * (d - mean);
    est.std_error = std::sqrt(ss / (b - 1.0));
    est.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(below, above)) / b);

    std::sort(draws.begin(), draws.end());
    const double tail = 0.5 * (1.0 - options.level);
    est.ci = {sorted_quantile(draws, tail), sorted_quantile(draws, 1.0 - tail)};
    return est;
}

}  // namespace gca
