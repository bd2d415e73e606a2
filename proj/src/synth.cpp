#include "gca/synth.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gca/error.hpp"
#include "gca/random.hpp"

namespace gca {

std::string to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::MediatorPlusDirect: return "mediator_plus_direct";
        case GraphKind::Confounder: return "confounder";
        case GraphKind::ConfounderPlusIndependent: return "confounder_plus_independent";
        case GraphKind::Custom: return "custom";
    }
    return "custom";
}

CausalGraphSpec mediator_plus_direct(double direct, std::size_t length, std::uint64_t seed) {
    CausalGraphSpec s;
    s.kind = GraphKind::MediatorPlusDirect;
    s.nodes = {"X", "Z", "Y"};
    s.edges = {{"X", "X", 1, 0.5}, {"X", "Z", 1, 0.6}, {"Z", "Y", 1, 0.6}};
    if (direct != 0.0) s.edges.push_back({"X", "Y", 1, direct});
    s.length = length;
    s.seed = seed;
    return s;
}

CausalGraphSpec confounder(std::size_t length, std::uint64_t seed) {
    CausalGraphSpec s;
    s.kind = GraphKind::Confounder;
    s.nodes = {"Z", "X", "Y"};
    s.edges = {{"Z", "Z", 1, 0.8}, {"Z", "X", 1, 0.7}, {"Z", "Y", 1, 0.7}};
    s.length = length;
    s.seed = seed;
    return s;
}

CausalGraphSpec confounder_plus_independent(std::size_t length, std::uint64_t seed) {
    CausalGraphSpec s = confounder(length, seed);
    s.kind = GraphKind::ConfounderPlusIndependent;
    s.nodes.push_back("A");
    s.edges.push_back({"A", "A", 1, 0.5});
    s.edges.push_back({"A", "Y", 1, 0.6});
    return s;
}

CausalGraphSpec direct_edge(double coefficient, std::size_t length, std::uint64_t seed) {
    CausalGraphSpec s;
    s.nodes = {"X", "Y"};
    s.edges = {{"X", "Y", 1, coefficient}};
    s.length = length;
    s.seed = seed;
    return s;
}

namespace {

std::size_t node_index(const CausalGraphSpec& spec, const std::string& name) {
    auto it = std::find(spec.nodes.begin(), spec.nodes.end(), name);
    if (it == spec.nodes.end()) throw Error(ErrorCode::InvalidArgument, "edge refers to unknown node '" + name + "'");
    return static_cast<std::size_t>(it - spec.nodes.begin());
}

int max_lag(const CausalGraphSpec& spec) {
    int lag = 1;
    for (const auto& e : spec.edges) lag = std::max(lag, e.lag);
    return lag;
}

void check_structure(const CausalGraphSpec& spec) {
    if (spec.nodes.empty()) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.nodes.size(); ++j) {
            if (spec.nodes[i] == spec.nodes[j]) {
                throw Error(ErrorCode::InvalidArgument, "duplicate node '" + spec.nodes[i] + "'");
            }
        }
    }
    for (const auto& e : spec.edges) {
        node_index(spec, e.from);
        node_index(spec, e.to);
        if (e.lag < 1) {
            throw Error(ErrorCode::InvalidArgument,
                        "edge " + e.from + " -> " + e.to + " has lag " + std::to_string(e.lag) + "; lags start at 1");
        }
        if (!std::isfinite(e.coefficient)) {
            throw Error(ErrorCode::InvalidArgument, "edge " + e.from + " -> " + e.to + " has a non-finite coefficient");
        }
    }
    for (const auto& [name, sd] : spec.noise_sd) {
        node_index(spec, name);
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            throw Error(ErrorCode::InvalidArgument, "noise sd of '" + name + "' must be positive");
        }
    }
    if (spec.nodes.size() < 2) throw Error(ErrorCode::InvalidArgument, "graph needs at least two nodes");
    node_index(spec, spec.response);
    if (spec.length < 1) throw Error(ErrorCode::InvalidArgument, "series length must be positive");
}

}  // namespace

double spectral_radius(const CausalGraphSpec& spec) {
    check_structure(spec);
    const auto m = static_cast<Eigen::Index>(spec.nodes.size());
    const int lags = max_lag(spec);
    const Eigen::Index dim = m * lags;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& e : spec.edges) {
        const auto to = static_cast<Eigen::Index>(node_index(spec, e.to));
        const auto from = static_cast<Eigen::Index>(node_index(spec, e.from));
        companion(to, (e.lag - 1) * m + from) += e.coefficient;
    }
    if (lags > 1) companion.bottomLeftCorner(dim - m, dim - m).setIdentity();
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void validate(const CausalGraphSpec& spec) {
    const double rho = spectral_radius(spec);
    // Unit roots come back from the eigensolver as 1 - O(eps); treat them as non-stationary.
    if (!(rho < 1.0 - 1e-12)) {
        throw Error(ErrorCode::NonStationary, "companion spectral radius " + std::to_string(rho) + " is not below 1");
    }
}

Dataset simulate(const CausalGraphSpec& spec) {
    validate(spec);
    const std::size_t m = spec.nodes.size();
    const auto lags = static_cast<std::size_t>(max_lag(spec));
    const std::size_t burn = 10 * lags;
    const std::size_t total = burn + spec.length;

    std::vector<double> sd(m, 1.0);
    for (const auto& [name, v] : spec.noise_sd) sd[node_index(spec, name)] = v;
    struct IndexedEdge {
        std::size_t from;
        std::size_t to;
        std::size_t lag;
        double coefficient;
    };
    std::vector<IndexedEdge> edges;
    for (const auto& e : spec.edges) {
        edges.push_back({node_index(spec, e.from), node_index(spec, e.to), static_cast<std::size_t>(e.lag), e.coefficient});
    }

    // Zero pre-sample history; the burn-in washes it out.
    std::vector<std::vector<double>> v(m, std::vector<double>(total, 0.0));
    Rng rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t t = 0; t < total; ++t) {
        for (std::size_t i = 0; i < m; ++i) v[i][t] = sd[i] * normal(rng);
        for (const auto& e : edges) {
            if (t >= e.lag) v[e.to][t] += e.coefficient * v[e.from][t - e.lag];
        }
    }

    std::vector<Year> years(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) years[t] = static_cast<Year>(t + 1);
    TimeSeries response;
    std::vector<Covariate> covariates;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> values(v[i].begin() + static_cast<std::ptrdiff_t>(burn), v[i].end());
        TimeSeries s(spec.nodes[i], "dimensionless", years, std::move(values));
        if (spec.nodes[i] == spec.response) {
            response = std::move(s);
        } else {
            covariates.push_back({std::move(s), CovariateRole::Driver});
        }
    }
    return Dataset(std::move(response), std::move(covariates));
}

ExperimentReport run_size_power(const CausalGraphSpec& spec, const VarSpec& var_spec, double alpha, int replicates,
                                std::uint64_t master_seed) {
    if (replicates < 100) {
        throw Error(ErrorCode::TooFewReplicates,
                    "size/power experiments need at least 100 replicates, got " + std::to_string(replicates));
    }
    validate(spec);
    struct Outcome {
        bool reject = false;
        double f = 0.0;
    };
    const auto outcomes = parallel_map<Outcome>(static_cast<std::size_t>(replicates), [&](std::size_t i) {
        CausalGraphSpec s = spec;
        s.seed = replicate_seed(master_seed, i);
        const GcResult r = gc_test(simulate(s), var_spec, alpha);
        return Outcome{r.reject, r.f_statistic};
    });

    ExperimentReport rep;
    rep.replicates = outcomes.size();
    rep.alpha = alpha;
    double f_sum = 0.0;
    for (const auto& o : outcomes) {
        rep.rejections += o.reject ? 1 : 0;
        f_sum += o.f;
    }
    const auto n = static_cast<double>(rep.replicates);
    rep.rejection_rate = static_cast<double>(rep.rejections) / n;
    rep.mc_standard_error = std::sqrt(rep.rejection_rate * (1.0 - rep.rejection_rate) / n);
    rep.mean_f = f_sum / n;

    std::ostringstream os;
    os << to_string(spec.kind) << " graph, T=" << spec.length << ", test " << var_spec.target << " <- ";
    for (std::size_t j = 0; j < var_spec.causes.size(); ++j) os << (j ? "," : "") << var_spec.causes[j];
    os << " | {";
    for (std::size_t j = 0; j < var_spec.conditioning.size(); ++j) os << (j ? "," : "") << var_spec.conditioning[j];
    os << "}, order " << var_spec.order;
    rep.description = os.str();
    return rep;
}

}  // namespace gca
