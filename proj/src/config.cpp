#include "gca/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "gca/error.hpp"
#include "json.hpp"

namespace gca {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ConfigError, where + ": " + what);
}

std::string at(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) bad(where.empty() ? "<root>" : where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) bad(at(where, key), "unknown key");
    }
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    const json* v = find(obj, key);
    if (!v) bad(at(where, key), "required key missing");
    return *v;
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) bad(where, "expected a string");
    return v.get<std::string>();
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) bad(where, "expected a number");
    return v.get<double>();
}

long long as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) bad(where, "expected an integer");
    return v.get<long long>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) bad(where, "expected true or false");
    return v.get<bool>();
}

std::pair<Year, Year> as_window(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) bad(where, "expected [first_year, last_year]");
    const auto a = static_cast<Year>(as_integer(v[0], at(where, 0)));
    const auto b = static_cast<Year>(as_integer(v[1], at(where, 1)));
    if (a > b) bad(where, "window is empty");
    return {a, b};
}

std::vector<std::string> as_names(const json& v, const std::string& where) {
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) bad(where, "expected a name or a list of names");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], at(where, i)));
    return out;
}

fs::path as_file(const json& v, const std::string& where, const fs::path& base) {
    const fs::path p = fs::path(as_string(v, where));
    const fs::path full = p.is_absolute() ? p : base / p;
    if (!fs::is_regular_file(full)) bad(where, "file not found: " + full.string());
    return full;
}

std::vector<Transform> parse_transforms(const json& v, const std::string& where, const fs::path& base) {
    std::vector<Transform> out;
    if (!v.is_array()) bad(where, "expected a list of transforms");
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string w = at(where, i);
        const json& t = v[i];
        if (!t.is_object() || t.size() != 1) {
            bad(w, "each transform is an object with exactly one of anomalies, baseline_shift, sum_with");
        }
        Transform tr;
        if (const json* a = find(t, "anomalies")) {
            tr.kind = Transform::Kind::Anomalies;
            std::tie(tr.first, tr.last) = as_window(*a, at(w, "anomalies"));
        } else if (const json* b = find(t, "baseline_shift")) {
            tr.kind = Transform::Kind::BaselineShift;
            tr.first = tr.last = static_cast<Year>(as_integer(*b, at(w, "baseline_shift")));
        } else if (const json* s = find(t, "sum_with")) {
            tr.kind = Transform::Kind::SumWith;
            tr.path = as_file(*s, at(w, "sum_with"), base);
        } else {
            bad(w, "unknown transform '" + t.begin().key() + "'");
        }
        out.push_back(std::move(tr));
    }
    return out;
}

SeriesSpec parse_series(const json& v, const std::string& where, const fs::path& base, bool with_role) {
    if (with_role) {
        allow_keys(v, where, {"name", "path", "unit", "role", "transforms"});
    } else {
        allow_keys(v, where, {"name", "path", "unit", "transforms", "anomaly_baseline"});
    }
    SeriesSpec s;
    s.where = where;
    s.path = as_file(require(v, "path", where), at(where, "path"), base);
    s.name = find(v, "name") ? as_string(v["name"], at(where, "name")) : s.path.stem().string();
    if (s.name.empty()) bad(at(where, "name"), "name must not be empty");
    if (const json* u = find(v, "unit")) s.unit = as_string(*u, at(where, "unit"));
    if (with_role) {
        const std::string role = as_string(require(v, "role", where), at(where, "role"));
        if (role == "forced") {
            s.role = CovariateRole::Forced;
        } else if (role == "driver") {
            s.role = CovariateRole::Driver;
        } else {
            bad(at(where, "role"), "expected 'forced' or 'driver', got '" + role + "'");
        }
    }
    if (const json* t = find(v, "transforms")) s.transforms = parse_transforms(*t, at(where, "transforms"), base);
    return s;
}

VarSpec parse_var(const json& v, const std::string& where) {
    VarSpec spec;
    spec.target = as_string(require(v, "target", where), at(where, "target"));
    spec.causes = as_names(require(v, "causes", where), at(where, "causes"));
    if (const json* c = find(v, "conditioning")) spec.conditioning = as_names(*c, at(where, "conditioning"));
    if (const json* o = find(v, "order")) {
        spec.order = static_cast<int>(as_integer(*o, at(where, "order")));
        if (spec.order < 1) bad(at(where, "order"), "order must be at least 1");
    }
    if (const json* i = find(v, "include_intercept")) spec.include_intercept = as_bool(*i, at(where, "include_intercept"));
    return spec;
}

double parse_alpha(const json& v, const std::string& where) {
    const double a = as_number(v, where);
    if (!(a > 0.0 && a < 1.0)) bad(where, "must lie in (0, 1)");
    return a;
}

void parse_scenarios(const json& v, const std::string& where, AnalysisConfig& cfg) {
    allow_keys(v, where, {"pi_pd", "named"});
    std::set<std::string> names;
    if (const json* p = find(v, "pi_pd")) {
        const std::string w = at(where, "pi_pd");
        ScenarioWindows windows;
        if (p->is_boolean()) {
            if (p->get<bool>()) cfg.pi_pd_scenarios = windows;
        } else {
            allow_keys(*p, w, {"pi_window", "pd_year", "anthropogenic"});
            if (const json* pi = find(*p, "pi_window")) {
                std::tie(windows.pi_first, windows.pi_last) = as_window(*pi, at(w, "pi_window"));
            }
            if (const json* pd = find(*p, "pd_year")) windows.pd_year = static_cast<Year>(as_integer(*pd, at(w, "pd_year")));
            if (const json* a = find(*p, "anthropogenic")) windows.anthropogenic = as_string(*a, at(w, "anthropogenic"));
            cfg.pi_pd_scenarios = windows;
        }
        if (cfg.pi_pd_scenarios) names = {"PI", "PD"};
    }
    if (const json* named = find(v, "named")) {
        const std::string w = at(where, "named");
        if (!named->is_array()) bad(w, "expected a list of scenarios");
        for (std::size_t i = 0; i < named->size(); ++i) {
            const std::string wi = at(w, i);
            const json& s = (*named)[i];
            allow_keys(s, wi, {"name", "values"});
            Scenario sc;
            sc.name = as_string(require(s, "name", wi), at(wi, "name"));
            if (!names.insert(sc.name).second) bad(at(wi, "name"), "duplicate scenario name '" + sc.name + "'");
            const json& values = require(s, "values", wi);
            if (!values.is_object()) bad(at(wi, "values"), "expected an object mapping covariate to value");
            for (const auto& [k, val] : values.items()) sc.assignment[k] = as_number(val, at(at(wi, "values"), k));
            cfg.named_scenarios.push_back(std::move(sc));
        }
    }
}

void parse_tests(const json& v, const std::string& where, const fs::path& base, TestsSpec& tests) {
    allow_keys(v, where, {"deltas", "factor_deltas", "granger", "fingerprint", "risk_ratios"});
    if (const json* d = find(v, "deltas")) {
        const std::string w = at(where, "deltas");
        if (!d->is_array()) bad(w, "expected a list");
        for (std::size_t i = 0; i < d->size(); ++i) {
            const std::string wi = at(w, i);
            allow_keys((*d)[i], wi, {"name", "from", "to"});
            DeltaSpec ds;
            ds.name = as_string(require((*d)[i], "name", wi), at(wi, "name"));
            if (const json* f = find((*d)[i], "from")) ds.from = as_string(*f, at(wi, "from"));
            if (const json* t = find((*d)[i], "to")) ds.to = as_string(*t, at(wi, "to"));
            tests.deltas.push_back(ds);
        }
    }
    if (const json* f = find(v, "factor_deltas")) tests.factor_deltas = as_bool(*f, at(where, "factor_deltas"));
    if (const json* g = find(v, "granger")) {
        const std::string w = at(where, "granger");
        if (!g->is_array()) bad(w, "expected a list");
        for (std::size_t i = 0; i < g->size(); ++i) {
            const std::string wi = at(w, i);
            const json& gi = (*g)[i];
            allow_keys(gi, wi,
                       {"name", "target", "causes", "conditioning", "order", "include_intercept", "alpha", "max_order",
                        "criterion"});
            GrangerSpec gs;
            gs.var = parse_var(gi, wi);
            gs.name = find(gi, "name") ? as_string(gi["name"], at(wi, "name")) : gs.var.target;
            if (const json* a = find(gi, "alpha")) gs.alpha = parse_alpha(*a, at(wi, "alpha"));
            if (const json* m = find(gi, "max_order")) {
                gs.max_order = static_cast<int>(as_integer(*m, at(wi, "max_order")));
                if (*gs.max_order < 1) bad(at(wi, "max_order"), "must be at least 1");
            }
            if (const json* c = find(gi, "criterion")) {
                const std::string crit = as_string(*c, at(wi, "criterion"));
                if (crit == "aic") {
                    gs.criterion = InformationCriterion::Aic;
                } else if (crit == "bic") {
                    gs.criterion = InformationCriterion::Bic;
                } else {
                    bad(at(wi, "criterion"), "expected 'aic' or 'bic'");
                }
            }
            tests.granger.push_back(std::move(gs));
        }
    }
    if (const json* fp = find(v, "fingerprint")) {
        const std::string w = at(where, "fingerprint");
        if (!fp->is_array()) bad(w, "expected a list");
        for (std::size_t i = 0; i < fp->size(); ++i) {
            const std::string wi = at(w, i);
            const json& fi = (*fp)[i];
            allow_keys(fi, wi, {"name", "fingerprints", "max_fingerprints", "compare_delta"});
            FingerprintSpec fs_spec;
            fs_spec.name = find(fi, "name") ? as_string(fi["name"], at(wi, "name")) : "fingerprint" + std::to_string(i);
            const json& list = require(fi, "fingerprints", wi);
            if (!list.is_array() || list.empty()) bad(at(wi, "fingerprints"), "expected a non-empty list");
            for (std::size_t k = 0; k < list.size(); ++k) {
                const std::string wk = at(at(wi, "fingerprints"), k);
                allow_keys(list[k], wk, {"name", "path", "fitted", "component"});
                FingerprintSource src;
                src.name = as_string(require(list[k], "name", wk), at(wk, "name"));
                const int kinds = (find(list[k], "path") ? 1 : 0) + (find(list[k], "fitted") ? 1 : 0) +
                                  (find(list[k], "component") ? 1 : 0);
                if (kinds != 1) bad(wk, "give exactly one of path, fitted, component");
                if (const json* p = find(list[k], "path")) {
                    src.kind = FingerprintSource::Kind::File;
                    src.path = as_file(*p, at(wk, "path"), base);
                } else if (const json* ft = find(list[k], "fitted")) {
                    if (!as_bool(*ft, at(wk, "fitted"))) bad(at(wk, "fitted"), "only 'true' is meaningful");
                    src.kind = FingerprintSource::Kind::Fitted;
                } else {
                    src.kind = FingerprintSource::Kind::Component;
                    src.component = as_string(list[k]["component"], at(wk, "component"));
                }
                fs_spec.fingerprints.push_back(std::move(src));
            }
            if (const json* m = find(fi, "max_fingerprints")) {
                const long long mf = as_integer(*m, at(wi, "max_fingerprints"));
                if (mf < 1) bad(at(wi, "max_fingerprints"), "must be at least 1");
                fs_spec.max_fingerprints = static_cast<std::size_t>(mf);
            }
            if (const json* c = find(fi, "compare_delta")) fs_spec.compare_delta = as_string(*c, at(wi, "compare_delta"));
            tests.fingerprint.push_back(std::move(fs_spec));
        }
    }
    if (const json* r = find(v, "risk_ratios")) {
        const std::string w = at(where, "risk_ratios");
        if (!r->is_array()) bad(w, "expected a list");
        for (std::size_t i = 0; i < r->size(); ++i) {
            const std::string wi = at(w, i);
            const json& ri = (*r)[i];
            allow_keys(ri, wi, {"name", "threshold", "factual", "counterfactual"});
            RiskRatioSpec rs;
            rs.threshold = as_number(require(ri, "threshold", wi), at(wi, "threshold"));
            rs.name = find(ri, "name") ? as_string(ri["name"], at(wi, "name")) : "rr" + std::to_string(i);
            if (const json* f = find(ri, "factual")) rs.factual = as_string(*f, at(wi, "factual"));
            if (const json* c = find(ri, "counterfactual")) rs.counterfactual = as_string(*c, at(wi, "counterfactual"));
            tests.risk_ratios.push_back(rs);
        }
    }
}

void parse_inference(const json& v, const std::string& where, InferenceSpec& inf) {
    allow_keys(v, where, {"method", "replicates", "seed", "level"});
    if (const json* m = find(v, "method")) {
        const std::string method = as_string(*m, at(where, "method"));
        if (method == "analytic") {
            inf.method = InferenceMethod::Analytic;
        } else if (method == "bootstrap") {
            inf.method = InferenceMethod::Bootstrap;
        } else {
            bad(at(where, "method"), "expected 'analytic' or 'bootstrap'");
        }
    }
    if (const json* r = find(v, "replicates")) {
        const long long reps = as_integer(*r, at(where, "replicates"));
        if (reps < 1) bad(at(where, "replicates"), "must be positive");
        inf.replicates = static_cast<int>(reps);
    }
    if (const json* s = find(v, "seed")) {
        if (!s->is_number_unsigned()) bad(at(where, "seed"), "expected a non-negative integer");
        inf.seed = s->get<std::uint64_t>();
    }
    if (const json* l = find(v, "level")) inf.level = parse_alpha(*l, at(where, "level"));
}

SimulateSpec parse_simulate(const json& v, const std::string& where) {
    allow_keys(v, where,
               {"graph", "direct", "nodes", "edges", "noise_sd", "length", "seed", "response", "test", "alpha",
                "replicates"});
    SimulateSpec sim;
    const std::string kind = find(v, "graph") ? as_string(v["graph"], at(where, "graph")) : "custom";
    std::size_t length = 500;
    if (const json* l = find(v, "length")) {
        const long long len = as_integer(*l, at(where, "length"));
        if (len < 1) bad(at(where, "length"), "must be positive");
        length = static_cast<std::size_t>(len);
    }
    std::uint64_t seed = 1;
    if (const json* s = find(v, "seed")) {
        if (!s->is_number_unsigned()) bad(at(where, "seed"), "expected a non-negative integer");
        seed = s->get<std::uint64_t>();
    }
    if (kind == "mediator_plus_direct") {
        const double direct = find(v, "direct") ? as_number(v["direct"], at(where, "direct")) : 0.4;
        sim.graph = mediator_plus_direct(direct, length, seed);
    } else if (kind == "confounder") {
        sim.graph = confounder(length, seed);
    } else if (kind == "confounder_plus_independent") {
        sim.graph = confounder_plus_independent(length, seed);
    } else if (kind == "custom") {
        sim.graph.kind = GraphKind::Custom;
        sim.graph.length = length;
        sim.graph.seed = seed;
        sim.graph.nodes = as_names(require(v, "nodes", where), at(where, "nodes"));
        const json& edges = require(v, "edges", where);
        if (!edges.is_array()) bad(at(where, "edges"), "expected a list");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const std::string wi = at(at(where, "edges"), i);
            allow_keys(edges[i], wi, {"from", "to", "lag", "coefficient"});
            Edge e;
            e.from = as_string(require(edges[i], "from", wi), at(wi, "from"));
            e.to = as_string(require(edges[i], "to", wi), at(wi, "to"));
            e.lag = find(edges[i], "lag") ? static_cast<int>(as_integer(edges[i]["lag"], at(wi, "lag"))) : 1;
            e.coefficient = as_number(require(edges[i], "coefficient", wi), at(wi, "coefficient"));
            sim.graph.edges.push_back(e);
        }
    } else {
        bad(at(where, "graph"), "unknown graph '" + kind + "'");
    }
    if (find(v, "direct") && kind != "mediator_plus_direct") bad(at(where, "direct"), "only used by mediator_plus_direct");
    if (kind != "custom" && (find(v, "nodes") || find(v, "edges"))) bad(where, "nodes and edges apply to custom graphs");
    if (const json* n = find(v, "noise_sd")) {
        if (!n->is_object()) bad(at(where, "noise_sd"), "expected an object mapping node to sd");
        for (const auto& [k, val] : n->items()) sim.graph.noise_sd[k] = as_number(val, at(at(where, "noise_sd"), k));
    }
    if (const json* r = find(v, "response")) sim.graph.response = as_string(*r, at(where, "response"));
    if (const json* t = find(v, "test")) {
        allow_keys(*t, at(where, "test"), {"target", "causes", "conditioning", "order", "include_intercept"});
        sim.test = parse_var(*t, at(where, "test"));
    } else {
        sim.test.target = sim.graph.response;
        sim.test.causes = {"X"};
    }
    if (const json* a = find(v, "alpha")) sim.alpha = parse_alpha(*a, at(where, "alpha"));
    if (const json* r = find(v, "replicates")) sim.replicates = static_cast<int>(as_integer(*r, at(where, "replicates")));
    try {
        validate(sim.graph);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonStationary) throw;
        bad(where, e.what());
    }
    return sim;
}

}  // namespace

AnalysisConfig parse_config(const std::string& text, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(root, "",
               {"response", "covariates", "auxiliary", "span", "include_intercept", "error_family", "scenarios",
                "tests", "inference", "simulate"});

    AnalysisConfig cfg;
    cfg.text = text;
    cfg.base_dir = base_dir;

    if (const json* r = find(root, "response")) {
        cfg.response = parse_series(*r, "response", base_dir, false);
        if (const json* b = find(*r, "anomaly_baseline")) cfg.anomaly_baseline = as_window(*b, "response.anomaly_baseline");
    } else if (!find(root, "simulate")) {
        bad("response", "required unless the config only describes a simulation");
    }

    std::set<std::string> names{cfg.response.name};
    if (const json* c = find(root, "covariates")) {
        if (!c->is_array()) bad("covariates", "expected a list");
        for (std::size_t i = 0; i < c->size(); ++i) {
            cfg.covariates.push_back(parse_series((*c)[i], at("covariates", i), base_dir, true));
            if (!names.insert(cfg.covariates.back().name).second) {
                bad(at("covariates", i), "duplicate series name '" + cfg.covariates.back().name + "'");
            }
        }
    }
    if (const json* a = find(root, "auxiliary")) {
        if (!a->is_array()) bad("auxiliary", "expected a list");
        for (std::size_t i = 0; i < a->size(); ++i) {
            cfg.auxiliary.push_back(parse_series((*a)[i], at("auxiliary", i), base_dir, false));
            if (find((*a)[i], "anomaly_baseline")) bad(at("auxiliary", i), "anomaly_baseline applies to the response");
        }
    }
    if (!cfg.response.path.empty() && cfg.covariates.empty()) bad("covariates", "at least one covariate is required");
    if (const json* s = find(root, "span")) cfg.span = as_window(*s, "span");
    if (const json* i = find(root, "include_intercept")) cfg.include_intercept = as_bool(*i, "include_intercept");
    if (const json* f = find(root, "error_family")) {
        const std::string fam = as_string(*f, "error_family");
        if (fam == "gaussian") {
            cfg.error_family = ErrorFamily::Gaussian;
        } else if (fam == "gev") {
            cfg.error_family = ErrorFamily::Gev;
        } else {
            bad("error_family", "expected 'gaussian' or 'gev'");
        }
    }
    if (const json* s = find(root, "scenarios")) parse_scenarios(*s, "scenarios", cfg);
    if (const json* t = find(root, "tests")) parse_tests(*t, "tests", base_dir, cfg.tests);
    if (const json* i = find(root, "inference")) parse_inference(*i, "inference", cfg.inference);
    if (const json* s = find(root, "simulate")) cfg.simulate = parse_simulate(*s, "simulate");
    return cfg;
}

AnalysisConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    AnalysisConfig cfg = parse_config(buf.str(), path.parent_path());
    cfg.source = path;
    return cfg;
}

}  // namespace gca
