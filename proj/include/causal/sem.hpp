#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "causal/dataset.hpp"
#include "causal/graph.hpp"

// Linear structural equation models used to synthesize benchmark tables with
// a known ground-truth structure.

namespace causal {

enum class NoiseKind { Gaussian, Uniform };

struct SemEdge {
    std::string from, to;
    double weight = 1.0;
};

struct SemSpec {
    std::vector<std::string> nodes;  // sampling order follows this list
    std::vector<SemEdge> edges;
    NoiseKind noise = NoiseKind::Gaussian;
    std::set<std::string> latent;  // sampled but excluded from the output table
};

// Throws std::invalid_argument on unknown node references, self loops,
// duplicate edges, or a cyclic structure.
void validate_spec(const SemSpec& spec);

// Ancestors are sampled before descendants; both noise kinds have unit
// variance (uniform noise spans ±sqrt(3)). Latent columns are dropped from
// the returned table.
Table synth_sem(const SemSpec& spec, long n, std::uint64_t seed);

// Exact covariance of all nodes (latent included), in spec node order.
Eigen::MatrixXd population_covariance(const SemSpec& spec);

// Exact correlation of the observed nodes, packaged with a nominal sample
// size for use wherever sample statistics would go.
SufficientStats population_stats(const SemSpec& spec, long n);

// The generating DAG restricted to observed nodes. Only meaningful when no
// latent node connects two observed ones.
MixedGraph spec_dag(const SemSpec& spec);

std::string sem_to_json(const SemSpec& spec, std::optional<std::uint64_t> seed = std::nullopt);
SemSpec sem_from_json(std::string_view text);

// Random DAG over `nodes` names x00, x01, ...; each forward pair is linked
// with probability edge_prob and a weight drawn uniformly from
// +-[weight_lo, weight_hi].
SemSpec random_dag_spec(int nodes, double edge_prob, std::uint64_t seed,
                        NoiseKind noise = NoiseKind::Gaussian, double weight_lo = 0.4,
                        double weight_hi = 0.9);

}  // namespace causal
