#include "gca/granger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gca/error.hpp"

namespace gca {

std::string lag_column(const std::string& series, int lag) { return series + ".lag" + std::to_string(lag); }

namespace {

void check_spec(const VarSpec& spec) {
    if (spec.order < 1) throw Error(ErrorCode::InvalidArgument, "VAR order must be at least 1");
    if (spec.causes.empty()) throw Error(ErrorCode::InvalidArgument, "at least one candidate cause is required");
    std::set<std::string> seen{spec.target};
    for (const auto* group : {&spec.causes, &spec.conditioning}) {
        for (const auto& name : *group) {
            if (!seen.insert(name).second) {
                throw Error(ErrorCode::InvalidArgument,
                            "'" + name + "' appears more than once among target, causes and conditioning");
            }
        }
    }
}

}  // namespace

LaggedDesign build_lagged_design(const Dataset& dataset, const VarSpec& spec, std::size_t first_row) {
    check_spec(spec);
    const auto p = static_cast<std::size_t>(spec.order);
    const std::size_t start = std::max(p, first_row);
    const std::size_t total = dataset.rows();

    std::vector<std::string> order{spec.target};
    order.insert(order.end(), spec.conditioning.begin(), spec.conditioning.end());
    const std::size_t restricted_series = order.size();
    order.insert(order.end(), spec.causes.begin(), spec.causes.end());

    const std::size_t columns = order.size() * p + (spec.include_intercept ? 1 : 0);
    const std::size_t others = order.size() - 1;
    const std::size_t needed = std::max(p + others + 5, columns + 1);
    const std::size_t rows = total > start ? total - start : 0;
    if (rows < needed) {
        throw Error(ErrorCode::InsufficientData, std::to_string(rows) + " usable rows after lagging, need " +
                                                     std::to_string(needed) + " for " + std::to_string(columns) +
                                                     " columns");
    }

    LaggedDesign out;
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (std::size_t s = 0; s < order.size(); ++s) {
        const auto values = dataset.series(order[s]).values();
        for (std::size_t lag = 1; lag <= p; ++lag) {
            std::vector<double> col(rows);
            for (std::size_t r = 0; r < rows; ++r) col[r] = values[start + r - lag];
            names.push_back(lag_column(order[s], static_cast<int>(lag)));
            if (s >= restricted_series) out.cause_columns.push_back(names.back());
            cols.push_back(std::move(col));
        }
    }
    DesignMatrix full = DesignMatrix::from_columns(names, cols);
    if (spec.include_intercept) full = full.add_intercept();
    out.restricted = full.without(out.cause_columns);
    out.unrestricted = std::move(full);

    const auto target = dataset.series(spec.target).values();
    const auto years = dataset.years();
    out.y.assign(target.begin() + static_cast<std::ptrdiff_t>(start), target.end());
    out.years.assign(years.begin() + static_cast<std::ptrdiff_t>(start), years.end());
    return out;
}

double gaussian_transfer_entropy(double rss_restricted, double rss_unrestricted) {
    if (!(rss_restricted > 0.0) || !(rss_unrestricted > 0.0) || rss_restricted < rss_unrestricted) {
        throw Error(ErrorCode::InvalidRss, "transfer entropy needs 0 < rss_unrestricted <= rss_restricted");
    }
    return 0.5 * std::log(rss_restricted / rss_unrestricted);
}

GcResult gc_test(const Dataset& dataset, const VarSpec& spec, double alpha, const OlsOptions& options) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    const LaggedDesign design = build_lagged_design(dataset, spec);

    GcResult r;
    r.alpha = alpha;
    r.unrestricted = ols_fit(design.unrestricted, design.y, options);
    r.restricted = ols_fit(design.restricted, design.y, options);
    const TestResult f = f_test_nested(r.unrestricted, r.restricted);
    r.f_statistic = f.statistic;
    r.p_value = f.p_value;
    r.dof_numerator = static_cast<int>(f.dof_numerator.value_or(0));
    r.dof_denominator = static_cast<int>(f.dof_denominator.value_or(0));
    r.rss_unrestricted = r.unrestricted.rss;
    r.rss_restricted = r.restricted.rss;
    r.reject = r.p_value < alpha;

    if (r.f_statistic == 0.0) {
        r.gaussian_te = 0.0;
    } else if (r.rss_unrestricted == 0.0) {
        r.gaussian_te = std::numeric_limits<double>::infinity();
    } else {
        r.gaussian_te = gaussian_transfer_entropy(r.rss_restricted, r.rss_unrestricted);
    }
    return r;
}

int select_order(const Dataset& dataset, VarSpec spec, int p_max, InformationCriterion criterion,
                 const OlsOptions& options) {
    if (p_max < 1) throw Error(ErrorCode::InvalidArgument, "maximum order must be at least 1");
    const auto first_row = static_cast<std::size_t>(p_max);
    int best = 1;
    double best_value = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        spec.order = p;
        const LaggedDesign design = build_lagged_design(dataset, spec, first_row);
        const FitResult fit = ols_fit(design.unrestricted, design.y, options);
        const auto n = static_cast<double>(fit.rows());
        const auto k = static_cast<double>(fit.active_columns());
        const double penalty = criterion == InformationCriterion::Aic ? 2.0 * k : k * std::log(n);
        const double value = n * std::log(fit.rss / n) + penalty;
        if (value < best_value) {
            best_value = value;
            best = p;
        }
    }
    return best;
}

}  // namespace gca
