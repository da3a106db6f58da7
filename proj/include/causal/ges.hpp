#pragma once

#include <span>
#include <vector>

#include "causal/dataset.hpp"
#include "causal/graph.hpp"

namespace causal {

struct GesResult {
    MixedGraph graph;
    double total_score = 0.0;
    std::vector<double> score_trace;  // total before search, then after each move
    int pinv_count = 0;               // scoring solves that needed a pseudo-inverse
};

// Gaussian BIC local score of y given a parent set, from the correlation
// matrix: -(n/2) ln(residual variance) - ((k+1)/2) ln n, with the residual
// variance floored at 1e-12.
double bic_local(const SufficientStats& s, int y, std::span<const int> parents);

// Two-phase greedy equivalence search: forward inserts to a local maximum,
// then backward deletes. Ties between equal-scoring moves break on the
// smallest (x, y, set). Output is a completed pattern.
GesResult ges(const SufficientStats& s);

}  // namespace causal
