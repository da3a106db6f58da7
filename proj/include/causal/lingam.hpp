#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "causal/dataset.hpp"
#include "causal/graph.hpp"

namespace causal {

struct FastIcaOptions {
    int max_iter = 500;
    double tol = 1e-6;
    int restarts = 3;
};

// Symmetric fixed-point ICA with a tanh contrast on pre-standardized data
// (rows are samples). Returns the unmixing matrix W with sources = X * W^T.
// Each restart reinitializes from a seed derived from `seed`; throws
// FastIcaError when none converges.
Eigen::MatrixXd fastica(const Eigen::MatrixXd& x, std::uint64_t seed,
                        const FastIcaOptions& opt = {});

// Minimum-cost perfect assignment on a square matrix; result[row] = column.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

struct LingamResult {
    std::vector<int> order;  // column indices, exogenous first
    Eigen::MatrixXd b;       // raw-scale coefficients, b(i, j) multiplies column j in i's equation
    MixedGraph graph;        // weighted directed edges j -> i for nonzero b(i, j)
};

// Linear non-Gaussian model fit: standardize, unmix with fastica, permute
// rows to a dominant diagonal, read coefficients off the normalized unmixing
// matrix, extract a causal order, and zero entries the order forbids.
// Standardized coefficients below `prune` are dropped before rescaling.
LingamResult ica_lingam(const Table& t, std::uint64_t seed, double prune = 0.05);

}  // namespace causal
