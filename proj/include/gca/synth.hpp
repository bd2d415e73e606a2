#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gca/granger.hpp"
#include "gca/timeseries.hpp"

namespace gca {

enum class GraphKind { MediatorPlusDirect, Confounder, ConfounderPlusIndependent, Custom };

[[nodiscard]] std::string to_string(GraphKind kind);

/// source(t - lag) contributes coefficient * source(t - lag) to target(t).
struct Edge {
    std::string from;
    std::string to;
    int lag = 1;
    double coefficient = 0.0;
};

/**
 * @brief Linear stochastic network with lagged edges and Gaussian innovations.
 *
 * Nodes absent from `noise_sd` get unit innovation variance. The node named
 * `response` becomes the dataset response; every other node becomes a Driver covariate.
 */
struct CausalGraphSpec {
    GraphKind kind = GraphKind::Custom;
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    std::map<std::string, double> noise_sd;
    std::size_t length = 500;
    std::uint64_t seed = 1;
    std::string response = "Y";
};

/// X -> Z -> Y with an optional direct X -> Y edge (coefficient 0 gives pure mediation).
[[nodiscard]] CausalGraphSpec mediator_plus_direct(double direct, std::size_t length = 500, std::uint64_t seed = 1);
/// Z drives both X and Y; no path from X to Y.
[[nodiscard]] CausalGraphSpec confounder(std::size_t length = 500, std::uint64_t seed = 1);
/// The confounder graph plus a node A that drives Y independently.
[[nodiscard]] CausalGraphSpec confounder_plus_independent(std::size_t length = 500, std::uint64_t seed = 1);
/// Just X -> Y with the given coefficient at lag 1; no other edges.
[[nodiscard]] CausalGraphSpec direct_edge(double coefficient, std::size_t length = 500, std::uint64_t seed = 1);

/// Largest eigenvalue modulus of the VAR companion matrix.
[[nodiscard]] double spectral_radius(const CausalGraphSpec& spec);

/**
 * @brief Checks node names, edges, noise scales and stationarity.
 * @throws Error(InvalidArgument) for malformed specs.
 * @throws Error(NonStationary) if the spectral radius is not below 1.
 */
void validate(const CausalGraphSpec& spec);

/// Draws `length` years (numbered 1..length) after discarding 10 * max lag burn-in steps.
[[nodiscard]] Dataset simulate(const CausalGraphSpec& spec);

struct ExperimentReport {
    std::size_t replicates = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    double mc_standard_error = 0.0;  ///< sqrt(r (1 - r) / replicates)
    double mean_f = 0.0;
    double alpha = 0.05;
    std::string description;
};

/**
 * @brief Repeats simulate + gc_test with seeds derived from (master_seed, replicate).
 * @throws Error(TooFewReplicates) below 100 replicates.
 */
[[nodiscard]] ExperimentReport run_size_power(const CausalGraphSpec& spec, const VarSpec& var_spec, double alpha,
                                              int replicates, std::uint64_t master_seed);

}  // namespace gca
