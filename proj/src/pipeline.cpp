#include "gca/pipeline.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gca/csv.hpp"
#include "gca/error.hpp"
#include "gca/fingerprint.hpp"
#include "gca/granger.hpp"
#include "gca/synth.hpp"

namespace gca {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_string(Command c) {
    switch (c) {
        case Command::Fit: return "fit";
        case Command::Attribute: return "attribute";
        case Command::Granger: return "granger";
        case Command::Fingerprint: return "fingerprint";
        case Command::Simulate: return "simulate";
        case Command::Report: return "report";
    }
    return "report";
}

namespace {

std::string strip_code(const char* what) {
    const std::string s(what);
    const auto p = s.find(": ");
    return p == std::string::npos ? s : s.substr(p + 2);
}

template <class Fn>
auto in_context(const std::string& where, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), where + ": " + strip_code(e.what()));
    }
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : "NA"; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string label_for(const fs::path& path, const fs::path& base) {
    const fs::path rel = path.lexically_normal().lexically_relative(base.lexically_normal());
    return rel.empty() ? path.filename().generic_string() : rel.generic_string();
}

TimeSeries read_series(const fs::path& path, const std::string& name, const std::string& unit, const fs::path& base,
                       std::map<std::string, std::uint64_t>& hashes) {
    const std::string text = read_file(path);
    const std::string label = label_for(path, base);
    hashes[label] = fnv1a(text);
    return parse_csv(text, name, unit, label);
}

TimeSeries load_spec(const SeriesSpec& spec, const AnalysisConfig& cfg, std::map<std::string, std::uint64_t>& hashes) {
    TimeSeries s = in_context(spec.where, [&] { return read_series(spec.path, spec.name, spec.unit, cfg.base_dir, hashes); });
    for (std::size_t i = 0; i < spec.transforms.size(); ++i) {
        const Transform& t = spec.transforms[i];
        s = in_context(spec.where + ".transforms[" + std::to_string(i) + "]", [&] {
            switch (t.kind) {
                case Transform::Kind::Anomalies: return anomalies(s, t.first, t.last);
                case Transform::Kind::BaselineShift: return baseline_shift(s, t.first);
                case Transform::Kind::SumWith: return add(s, read_series(t.path, "", "", cfg.base_dir, hashes));
            }
            return s;
        });
    }
    s = s.renamed(spec.name, spec.unit);
    if (cfg.span) s = in_context("span", [&] { return restrict_years(s, cfg.span->first, cfg.span->second); });
    return s;
}

std::string beta_unit(const std::string& response_unit, const std::string& covariate_unit) {
    const std::string top = response_unit.empty() ? "1" : response_unit;
    if (covariate_unit.empty() || covariate_unit == "dimensionless" || covariate_unit == "1") return top;
    return top + " per " + covariate_unit;
}

const Scenario& find_scenario(const std::map<std::string, Scenario>& scenarios, const std::string& name,
                              const std::string& where) {
    auto it = scenarios.find(name);
    if (it == scenarios.end()) throw Error(ErrorCode::ConfigError, where + ": unknown scenario '" + name + "'");
    return it->second;
}

std::string method_name(InferenceMethod m) { return m == InferenceMethod::Analytic ? "analytic" : "bootstrap"; }

ojson change_json(const std::string& name, const ChangeEstimate& c, const std::string& unit) {
    ojson j;
    j["name"] = name;
    j["delta"] = num(c.delta);
    j["ci_lo"] = num(c.ci.lo);
    j["ci_hi"] = num(c.ci.hi);
    j["level"] = c.level;
    j["p_value"] = num(c.p_value);
    j["std_error"] = num(c.std_error);
    j["method"] = method_name(c.method);
    j["units"] = unit;
    return j;
}

struct TableRow {
    std::string name;
    double estimate;
    double lo;
    double hi;
    double p;
    std::string units;
};

ojson table_row_json(const TableRow& r) {
    ojson j;
    j["name"] = r.name;
    j["best_estimate"] = num(r.estimate);
    j["ci_lo"] = num(r.lo);
    j["ci_hi"] = num(r.hi);
    j["p_value"] = num(r.p);
    j["units"] = r.units;
    return j;
}

double lag1_autocorrelation(const Eigen::VectorXd& e) {
    const double denom = e.squaredNorm();
    if (e.size() < 2 || denom == 0.0) return 0.0;
    return e.head(e.size() - 1).dot(e.tail(e.size() - 1)) / denom;
}

double normal_two_sided_p(double z) { return std::isfinite(z) ? std::erfc(std::fabs(z) / std::sqrt(2.0)) : 0.0; }

bool wants(Command c, std::initializer_list<Command> set) {
    for (Command s : set) {
        if (s == c) return true;
    }
    return false;
}

}  // namespace

PreparedData prepare_data(const AnalysisConfig& cfg) {
    if (cfg.response.path.empty()) throw Error(ErrorCode::ConfigError, "response: no response series configured");
    PreparedData out;
    TimeSeries response = load_spec(cfg.response, cfg, out.file_hashes);
    if (cfg.anomaly_baseline) {
        response = in_context("response.anomaly_baseline", [&] {
            return anomalies(response, cfg.anomaly_baseline->first, cfg.anomaly_baseline->second);
        });
    }
    std::vector<Covariate> covs;
    for (const auto& c : cfg.covariates) covs.push_back({load_spec(c, cfg, out.file_hashes), c.role});
    out.dataset = in_context("covariates", [&] { return Dataset(std::move(response), std::move(covs)); });
    for (const auto& a : cfg.auxiliary) out.auxiliary.push_back(load_spec(a, cfg, out.file_hashes));
    return out;
}

RunResult run(const AnalysisConfig& cfg_in, const RunOptions& options) {
    AnalysisConfig cfg = cfg_in;
    if (options.seed) {
        cfg.inference.seed = *options.seed;
        if (cfg.simulate) cfg.simulate->graph.seed = *options.seed;
    }
    if (options.level) {
        if (!(*options.level > 0.0 && *options.level < 1.0)) {
            throw Error(ErrorCode::ConfigError, "--level: must lie in (0, 1)");
        }
        cfg.inference.level = *options.level;
    }
    const Command cmd = options.command;
    const double level = cfg.inference.level;
    const bool gaussian = cfg.error_family == ErrorFamily::Gaussian;

    RunResult res;
    ojson& rep = res.report;
    rep["command"] = to_string(cmd);

    const bool needs_data = cmd != Command::Simulate;
    if (needs_data) {
        res.data = prepare_data(cfg);
        const Dataset& ds = res.data->dataset;
        rep["response"] = {{"name", ds.response().name()}, {"unit", ds.response().unit()}};
        ojson data;
        const auto [first, last] = ds.span();
        data["first_year"] = first;
        data["last_year"] = last;
        data["rows"] = ds.rows();
        data["dropped_rows"] = ds.dropped_rows();
        data["covariates"] = ojson::array();
        for (const auto& c : ds.covariates()) {
            data["covariates"].push_back({{"name", c.series.name()},
                                          {"role", c.role == CovariateRole::Forced ? "forced" : "driver"},
                                          {"unit", c.series.unit()}});
        }
        rep["data"] = data;
        try {
            res.anthropogenic = anthropogenic_covariate(ds, cfg.pi_pd_scenarios.value_or(ScenarioWindows{}));
        } catch (const Error&) {
            res.anthropogenic.clear();
        }
    }

    const bool needs_fit = wants(cmd, {Command::Fit, Command::Attribute, Command::Fingerprint, Command::Report});
    const std::string resp_unit = res.data ? res.data->dataset.response().unit() : "";

    if (needs_fit && gaussian) {
        const Dataset& ds = res.data->dataset;
        res.model = in_context("covariates", [&] { return fit_statcf(ds, cfg.include_intercept); });
        const FitResult& fit = res.model->fit();
        ojson diag;
        diag["error_family"] = "gaussian";
        diag["r_squared"] = num(fit.r_squared);
        diag["residual_sd"] = num(fit.residual_sd);
        diag["rss"] = num(fit.rss);
        diag["dof"] = fit.dof;
        diag["n"] = fit.rows();
        diag["include_intercept"] = cfg.include_intercept;
        diag["condition_number"] = num(res.model->design().condition_number());
        diag["residual_lag1_autocorrelation"] = num(lag1_autocorrelation(fit.residuals));
        rep["diagnostics"] = diag;

        ojson coefs = ojson::array();
        std::vector<std::vector<std::string>> table{
            {"name", "estimate", "std_error", "ci_lo", "ci_hi", "t_statistic", "p_value", "units"}};
        for (std::size_t j = 0; j < fit.names.size(); ++j) {
            const std::string& name = fit.names[j];
            const Interval ci = coef_ci(fit, name, level);
            const TestResult t = t_test_zero(fit, name);
            const std::string unit =
                name == kInterceptName ? resp_unit : beta_unit(resp_unit, ds.series(name).unit());
            ojson c;
            c["name"] = name;
            c["estimate"] = num(fit.coefficient(name));
            c["std_error"] = num(fit.std_error(name));
            c["ci_lo"] = num(ci.lo);
            c["ci_hi"] = num(ci.hi);
            c["level"] = level;
            c["t_statistic"] = num(t.statistic);
            c["p_value"] = num(t.p_value);
            c["units"] = unit;
            coefs.push_back(c);
            table.push_back({name, cell(fit.coefficient(name)), cell(fit.std_error(name)), cell(ci.lo), cell(ci.hi),
                             cell(t.statistic), cell(t.p_value), unit});
        }
        rep["coefficients"] = coefs;
        res.tables["coefficients.csv"] = std::move(table);
    } else if (needs_fit) {
        res.warnings.push_back(
            "error_family gev treats each response value as a block maximum; fitting it to averages such as annual "
            "means is unconventional and the fitted shape may be hard to interpret");
        const Dataset& ds = res.data->dataset;
        res.gev = in_context("error_family", [&] { return gev_fit(ds); });
        const GevFit& g = *res.gev;
        const auto p = static_cast<Eigen::Index>(g.names.size());
        ojson gj;
        gj["error_family"] = "gev";
        gj["n"] = g.n;
        gj["location"] = ojson::array();
        for (Eigen::Index j = 0; j < p; ++j) {
            gj["location"].push_back({{"name", g.names[static_cast<std::size_t>(j)]},
                                      {"estimate", num(g.location_coefficients(j))},
                                      {"std_error", num(std::sqrt(g.covariance(j, j)))}});
        }
        gj["scale"] = num(g.scale);
        gj["scale_std_error"] = num(std::sqrt(g.covariance(p, p)));
        gj["shape"] = num(g.shape);
        gj["shape_std_error"] = num(std::sqrt(g.covariance(p + 1, p + 1)));
        gj["log_likelihood"] = num(g.log_likelihood);
        gj["iterations"] = g.iterations;
        rep["diagnostics"] = gj;
    }

    // Scenarios.
    std::map<std::string, Scenario> scenarios;
    const ScenarioWindows windows = cfg.pi_pd_scenarios.value_or(ScenarioWindows{});
    const bool needs_scenarios = wants(cmd, {Command::Attribute, Command::Fingerprint, Command::Report});
    if (needs_scenarios) {
        const Dataset& ds = res.data->dataset;
        if (cfg.pi_pd_scenarios) {
            auto [pi, pd] = in_context("scenarios.pi_pd", [&] { return make_pi_pd_scenarios(ds, windows); });
            scenarios[pi.name] = pi;
            scenarios[pd.name] = pd;
        }
        for (const auto& s : cfg.named_scenarios) scenarios[s.name] = s;
        ojson sj = ojson::array();
        std::vector<std::string> order;
        if (cfg.pi_pd_scenarios) order = {"PI", "PD"};
        for (const auto& s : cfg.named_scenarios) order.push_back(s.name);
        for (const auto& name : order) {
            const Scenario& s = scenarios[name];
            ojson one;
            one["name"] = s.name;
            ojson values;
            for (const auto& cname : ds.covariate_names()) {
                auto it = s.assignment.find(cname);
                values[cname] = it == s.assignment.end() ? ojson(nullptr) : num(it->second);
            }
            one["values"] = values;
            const std::string where = "scenarios." + s.name;
            if (res.model) {
                one["mean"] = num(in_context(where, [&] { return scenario_mean(*res.model, s); }));
            } else if (res.gev) {
                one["location"] = num(in_context(where, [&] { return location_at(*res.gev, s); }));
            }
            sj.push_back(one);
        }
        rep["scenarios"] = sj;
    }

    // Deltas.
    std::map<std::string, ChangeEstimate> deltas;
    std::vector<TableRow> table_rows;
    if (needs_scenarios && !cfg.tests.deltas.empty()) {
        ojson dj = ojson::array();
        std::vector<std::vector<std::string>> table{
            {"name", "from", "to", "delta", "ci_lo", "ci_hi", "p_value", "method", "units"}};
        for (std::size_t i = 0; i < cfg.tests.deltas.size(); ++i) {
            const DeltaSpec& d = cfg.tests.deltas[i];
            const std::string where = "tests.deltas[" + std::to_string(i) + "]";
            const Scenario& s1 = find_scenario(scenarios, d.from, where + ".from");
            const Scenario& s2 = find_scenario(scenarios, d.to, where + ".to");
            ChangeEstimate est;
            if (res.model) {
                est = in_context(where, [&] {
                    if (cfg.inference.method == InferenceMethod::Bootstrap) {
                        return bootstrap_delta(*res.model, s1, s2,
                                               {cfg.inference.replicates, cfg.inference.seed, level});
                    }
                    return delta(*res.model, s1, s2, level);
                });
            } else {
                // Location shift under the GEV fit, with a Wald interval from the observed information.
                const GevFit& g = *res.gev;
                const auto p = static_cast<Eigen::Index>(g.names.size());
                Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
                in_context(where, [&] {
                    for (Eigen::Index j = 0; j < p; ++j) {
                        const std::string& name = g.names[static_cast<std::size_t>(j)];
                        if (name == kInterceptName) continue;
                        const auto a = s1.assignment.find(name);
                        const auto b = s2.assignment.find(name);
                        if (a == s1.assignment.end() || b == s2.assignment.end()) {
                            throw Error(ErrorCode::IncompleteScenario, "scenario lacks '" + name + "'");
                        }
                        c(j) = b->second - a->second;
                    }
                    return 0;
                });
                est.delta = g.location_coefficients.dot(c);
                est.std_error = std::sqrt(std::max(0.0, c.dot(g.covariance.topLeftCorner(p, p) * c)));
                est.level = level;
                const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
                est.ci = {est.delta - z * est.std_error, est.delta + z * est.std_error};
                est.p_value = est.std_error > 0.0 ? normal_two_sided_p(est.delta / est.std_error)
                                                  : (est.delta == 0.0 ? 1.0 : 0.0);
            }
            deltas[d.name] = est;
            dj.push_back(change_json(d.name, est, resp_unit));
            ojson& back = dj.back();
            back["from"] = d.from;
            back["to"] = d.to;
            table.push_back({d.name, d.from, d.to, cell(est.delta), cell(est.ci.lo), cell(est.ci.hi),
                             cell(est.p_value), method_name(est.method), resp_unit});
        }
        rep["deltas"] = dj;
        res.tables["deltas.csv"] = std::move(table);
    }

    const bool attribution = wants(cmd, {Command::Attribute, Command::Report});
    if (attribution && gaussian) {
        const FitResult& fit = res.model->fit();
        const Dataset& ds = res.data->dataset;
        for (const auto& name : ds.covariate_names()) {
            const Interval ci = coef_ci(fit, name, level);
            table_rows.push_back({"beta_" + name, fit.coefficient(name), ci.lo, ci.hi, t_test_zero(fit, name).p_value,
                                  beta_unit(resp_unit, ds.series(name).unit())});
        }
        for (const auto& d : cfg.tests.deltas) {
            const ChangeEstimate& e = deltas.at(d.name);
            table_rows.push_back({"delta_" + d.name, e.delta, e.ci.lo, e.ci.hi, e.p_value, resp_unit});
        }
        if (cfg.tests.factor_deltas) {
            const auto fd = in_context("tests.factor_deltas", [&] {
                return factor_deltas(*res.model, res.data->auxiliary, windows, level);
            });
            const std::string ant = anthropogenic_covariate(ds, windows);
            std::vector<std::string> order;
            for (const auto& a : res.data->auxiliary) order.push_back(a.name());
            for (const auto& name : ds.covariate_names()) {
                if (name != ant) order.push_back(name);
            }
            ojson fj = ojson::array();
            for (const auto& name : order) {
                const ChangeEstimate& e = fd.at(name);
                fj.push_back(change_json(name, e, resp_unit));
                table_rows.push_back({"delta_" + name, e.delta, e.ci.lo, e.ci.hi, e.p_value, resp_unit});
            }
            rep["factor_deltas"] = fj;
        }
        table_rows.push_back({"internal_variability", fit.residual_sd, std::nan(""), std::nan(""), std::nan(""),
                              resp_unit});
        ojson tj = ojson::array();
        std::vector<std::vector<std::string>> table{{"name", "best_estimate", "ci_lo", "ci_hi", "p_value", "units"}};
        for (const auto& r : table_rows) {
            tj.push_back(table_row_json(r));
            table.push_back({r.name, cell(r.estimate), cell(r.lo), cell(r.hi), cell(r.p), r.units});
        }
        rep["attribution_table"] = tj;
        res.tables["attribution_table.csv"] = std::move(table);
    } else if (attribution && cfg.tests.factor_deltas) {
        res.warnings.push_back("factor_deltas are only defined for the gaussian error family; skipped");
    }

    if (attribution && !cfg.tests.risk_ratios.empty()) {
        if (gaussian) {
            throw Error(ErrorCode::ConfigError, "tests.risk_ratios: risk ratios require error_family gev");
        }
        ojson rj = ojson::array();
        std::vector<std::vector<std::string>> table{{"name", "threshold", "risk_ratio", "ci_lo", "ci_hi", "p_value",
                                                     "p_factual", "p_counterfactual", "replicates_failed"}};
        for (std::size_t i = 0; i < cfg.tests.risk_ratios.size(); ++i) {
            const RiskRatioSpec& r = cfg.tests.risk_ratios[i];
            const std::string where = "tests.risk_ratios[" + std::to_string(i) + "]";
            const Scenario& f = find_scenario(scenarios, r.factual, where + ".factual");
            const Scenario& c = find_scenario(scenarios, r.counterfactual, where + ".counterfactual");
            RiskRatioTestOptions opt;
            opt.replicates = cfg.inference.replicates;
            opt.seed = cfg.inference.seed;
            opt.level = level;
            const RiskRatio rr =
                in_context(where, [&] { return test_rr_one(res.data->dataset, f, c, r.threshold, opt); });
            ojson one;
            one["name"] = r.name;
            one["threshold"] = r.threshold;
            one["factual"] = r.factual;
            one["counterfactual"] = r.counterfactual;
            one["risk_ratio"] = num(rr.value);
            one["p_factual"] = num(rr.p_factual);
            one["p_counterfactual"] = num(rr.p_counterfactual);
            one["ci_lo"] = num(rr.ci.lo);
            one["ci_hi"] = num(rr.ci.hi);
            one["level"] = rr.level;
            one["p_value_rr1"] = num(rr.p_value_rr1);
            one["replicates_used"] = rr.replicates_used;
            one["replicates_failed"] = rr.replicates_failed;
            rj.push_back(one);
            table.push_back({r.name, cell(r.threshold), cell(rr.value), cell(rr.ci.lo), cell(rr.ci.hi),
                             cell(rr.p_value_rr1), cell(rr.p_factual), cell(rr.p_counterfactual),
                             std::to_string(rr.replicates_failed)});
        }
        rep["risk_ratios"] = rj;
        res.tables["risk_ratios.csv"] = std::move(table);
    }

    if (wants(cmd, {Command::Granger, Command::Report}) && !cfg.tests.granger.empty()) {
        ojson gj = ojson::array();
        std::vector<std::vector<std::string>> table{{"name", "target", "order", "f_statistic", "df_num", "df_den",
                                                     "p_value", "reject", "alpha", "gaussian_te"}};
        for (std::size_t i = 0; i < cfg.tests.granger.size(); ++i) {
            const GrangerSpec& g = cfg.tests.granger[i];
            const std::string where = "tests.granger[" + std::to_string(i) + "]";
            VarSpec v = g.var;
            const GcResult r = in_context(where, [&] {
                if (g.max_order) v.order = select_order(res.data->dataset, v, *g.max_order, g.criterion);
                return gc_test(res.data->dataset, v, g.alpha);
            });
            ojson one;
            one["name"] = g.name;
            one["target"] = v.target;
            one["causes"] = v.causes;
            one["conditioning"] = v.conditioning;
            one["order"] = v.order;
            one["order_selected"] = g.max_order.has_value();
            one["f_statistic"] = num(r.f_statistic);
            one["df_numerator"] = r.dof_numerator;
            one["df_denominator"] = r.dof_denominator;
            one["p_value"] = num(r.p_value);
            one["alpha"] = r.alpha;
            one["reject"] = r.reject;
            one["rss_unrestricted"] = num(r.rss_unrestricted);
            one["rss_restricted"] = num(r.rss_restricted);
            one["gaussian_te"] = num(r.gaussian_te);
            gj.push_back(one);
            table.push_back({g.name, v.target, std::to_string(v.order), cell(r.f_statistic),
                             std::to_string(r.dof_numerator), std::to_string(r.dof_denominator), cell(r.p_value),
                             r.reject ? "true" : "false", cell(r.alpha), cell(r.gaussian_te)});
        }
        rep["granger"] = gj;
        res.tables["granger.csv"] = std::move(table);
    }

    if (wants(cmd, {Command::Fingerprint, Command::Report}) && !cfg.tests.fingerprint.empty()) {
        const Dataset& ds = res.data->dataset;
        ojson fj = ojson::array();
        std::vector<std::vector<std::string>> table{
            {"analysis", "fingerprint", "estimate", "ci_lo", "ci_hi", "detected", "attributed"}};
        std::map<std::string, std::uint64_t> extra_hashes;
        for (std::size_t i = 0; i < cfg.tests.fingerprint.size(); ++i) {
            const FingerprintSpec& spec = cfg.tests.fingerprint[i];
            const std::string where = "tests.fingerprint[" + std::to_string(i) + "]";
            FingerprintSet set;
            set.max_fingerprints = spec.max_fingerprints;
            const auto obs = ds.response().values();
            set.observation.assign(obs.begin(), obs.end());
            for (std::size_t k = 0; k < spec.fingerprints.size(); ++k) {
                const FingerprintSource& src = spec.fingerprints[k];
                const std::string wk = where + ".fingerprints[" + std::to_string(k) + "]";
                std::vector<double> v(ds.rows());
                in_context(wk, [&] {
                    if (src.kind == FingerprintSource::Kind::File) {
                        const TimeSeries s = read_series(src.path, src.name, "", cfg.base_dir, res.data->file_hashes);
                        for (std::size_t t = 0; t < ds.rows(); ++t) v[t] = s.at(ds.years()[t]);
                    } else if (!res.model) {
                        throw Error(ErrorCode::ConfigError, "fitted fingerprints need the gaussian error family");
                    } else if (src.kind == FingerprintSource::Kind::Fitted) {
                        const auto& f = res.model->fit().fitted;
                        v.assign(f.data(), f.data() + f.size());
                    } else {
                        const double beta = res.model->fit().coefficient(src.component);
                        const auto x = ds.series(src.component).values();
                        for (std::size_t t = 0; t < ds.rows(); ++t) v[t] = beta * x[t];
                    }
                    return 0;
                });
                set.names.push_back(src.name);
                set.fingerprints.push_back(std::move(v));
            }
            const ScalingFactors sf = in_context(where, [&] { return of_fit(set, level); });
            ojson one;
            one["name"] = spec.name;
            one["level"] = level;
            one["factors"] = ojson::array();
            for (const auto& f : sf.factors) {
                one["factors"].push_back({{"name", f.name},
                                          {"estimate", num(f.estimate)},
                                          {"ci_lo", num(f.ci.lo)},
                                          {"ci_hi", num(f.ci.hi)},
                                          {"p_detection", num(f.p_detection)},
                                          {"p_attribution", num(f.p_attribution)},
                                          {"detected", f.detected},
                                          {"attributed", f.attributed}});
                table.push_back({spec.name, f.name, cell(f.estimate), cell(f.ci.lo), cell(f.ci.hi),
                                 f.detected ? "true" : "false", f.attributed ? "true" : "false"});
            }
            if (!spec.compare_delta.empty()) {
                auto it = deltas.find(spec.compare_delta);
                if (it == deltas.end()) {
                    throw Error(ErrorCode::ConfigError,
                                where + ".compare_delta: no delta named '" + spec.compare_delta + "' was computed");
                }
                one["comparison"] = of_compare_with_statcf(sf, it->second, resp_unit);
            }
            fj.push_back(one);
        }
        rep["fingerprint"] = fj;
        res.tables["fingerprint.csv"] = std::move(table);
    }

    if (wants(cmd, {Command::Simulate, Command::Report}) && cfg.simulate) {
        const SimulateSpec& sim = *cfg.simulate;
        const ExperimentReport er = in_context("simulate", [&] {
            return run_size_power(sim.graph, sim.test, sim.alpha, sim.replicates, sim.graph.seed);
        });
        ojson sj;
        sj["description"] = er.description;
        sj["graph"] = to_string(sim.graph.kind);
        sj["length"] = sim.graph.length;
        sj["master_seed"] = sim.graph.seed;
        sj["replicates"] = er.replicates;
        sj["alpha"] = er.alpha;
        sj["rejections"] = er.rejections;
        sj["rejection_rate"] = num(er.rejection_rate);
        sj["mc_standard_error"] = num(er.mc_standard_error);
        sj["mean_f"] = num(er.mean_f);
        rep["simulation"] = sj;
        res.tables["simulation.csv"] = {
            {"description", "replicates", "alpha", "rejection_rate", "mc_standard_error", "mean_f"},
            {er.description, std::to_string(er.replicates), cell(er.alpha), cell(er.rejection_rate),
             cell(er.mc_standard_error), cell(er.mean_f)}};

        const Dataset sample = simulate(sim.graph);
        std::vector<std::vector<std::string>> rows{{"year", sample.response().name()}};
        for (const auto& c : sample.covariates()) rows[0].push_back(c.series.name());
        for (std::size_t t = 0; t < sample.rows(); ++t) {
            std::vector<std::string> row{std::to_string(sample.years()[t]), cell(sample.response().values()[t])};
            for (const auto& c : sample.covariates()) row.push_back(cell(c.series.values()[t]));
            rows.push_back(std::move(row));
        }
        res.tables["simulated_data.csv"] = std::move(rows);
    }

    rep["warnings"] = res.warnings;
    ojson prov;
    prov["config_hash"] = hex(fnv1a(cfg.text));
    ojson files = ojson::array();
    if (res.data) {
        for (const auto& [path, h] : res.data->file_hashes) files.push_back({{"path", path}, {"fnv1a", hex(h)}});
    }
    prov["data_files"] = files;
    prov["seed"] = cfg.inference.seed;
    prov["level"] = level;
    prov["inference_method"] = method_name(cfg.inference.method);
    if (cfg.inference.method == InferenceMethod::Bootstrap) prov["replicates"] = cfg.inference.replicates;
    rep["provenance"] = prov;
    return res;
}

namespace {

void write_table(const fs::path& path, const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const std::string& c = row[i];
            const bool quote = c.find_first_of(",\"\n") != std::string::npos;
            if (i) out << ',';
            if (quote) {
                out << '"';
                for (char ch : c) out << (ch == '"' ? std::string("\"\"") : std::string(1, ch));
                out << '"';
            } else {
                out << c;
            }
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

void write_outputs(const RunResult& result, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
    {
        std::ofstream out(out_dir / "report.json", std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + (out_dir / "report.json").string());
        out << result.report.dump(2) << '\n';
    }
    for (const auto& [name, rows] : result.tables) write_table(out_dir / name, rows);
}

std::vector<fs::path> emit_plot_data(const RunResult& result, const fs::path& out_dir) {
    if (!result.data || (!result.model && !result.gev)) {
        throw Error(ErrorCode::InvalidArgument, "plot data needs a fitted dataset");
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

    const Dataset& ds = result.data->dataset;
    const auto years = ds.years();
    const std::size_t n = ds.rows();
    std::vector<fs::path> written;
    auto emit = [&](const std::string& file, std::vector<std::vector<std::string>> rows) {
        write_table(out_dir / file, rows);
        written.push_back(out_dir / file);
    };

    std::vector<std::vector<std::string>> resp{{"year", ds.response().name()}};
    for (std::size_t t = 0; t < n; ++t) resp.push_back({std::to_string(years[t]), cell(ds.response().values()[t])});
    emit("response.csv", std::move(resp));

    // The anthropogenic covariate and its components share one panel.
    const std::string& ant = result.anthropogenic;
    if (!ant.empty()) {
        std::vector<std::vector<std::string>> rows{{"year"}};
        for (const auto& a : result.data->auxiliary) rows[0].push_back(a.name());
        rows[0].push_back(ant);
        const auto antv = ds.series(ant).values();
        for (std::size_t t = 0; t < n; ++t) {
            std::vector<std::string> row{std::to_string(years[t])};
            for (const auto& a : result.data->auxiliary) {
                const auto idx = a.index_of(years[t]);
                row.push_back(idx ? cell(a.values()[*idx]) : "NA");
            }
            row.push_back(cell(antv[t]));
            rows.push_back(std::move(row));
        }
        emit("forcing.csv", std::move(rows));
    }
    for (const auto& c : ds.covariates()) {
        if (c.series.name() == ant) continue;
        std::vector<std::vector<std::string>> rows{{"year", c.series.name()}};
        for (std::size_t t = 0; t < n; ++t) rows.push_back({std::to_string(years[t]), cell(c.series.values()[t])});
        emit("covariate_" + c.series.name() + ".csv", std::move(rows));
    }

    Eigen::VectorXd fitted;
    if (result.model) {
        fitted = result.model->fit().fitted;
    } else {
        fitted = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), result.gev->location_coefficients(0));
        for (std::size_t j = 1; j < result.gev->names.size(); ++j) {
            const auto x = ds.series(result.gev->names[j]).values();
            for (std::size_t t = 0; t < n; ++t) {
                fitted(static_cast<Eigen::Index>(t)) += result.gev->location_coefficients(static_cast<Eigen::Index>(j)) * x[t];
            }
        }
    }
    std::vector<std::vector<std::string>> rows{{"year", "observed", "fitted", "residual"}};
    for (std::size_t t = 0; t < n; ++t) {
        const double obs = ds.response().values()[t];
        const double fit = fitted(static_cast<Eigen::Index>(t));
        rows.push_back({std::to_string(years[t]), cell(obs), cell(fit), cell(obs - fit)});
    }
    emit("fitted.csv", std::move(rows));
    return written;
}

}  // namespace gca
