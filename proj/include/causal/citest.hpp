#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "causal/dataset.hpp"

// Fisher-z conditional independence testing on a correlation matrix.

namespace causal {

struct CITResult {
    double statistic = 0.0;  // sqrt(n - |S| - 3) * |atanh(rho)|, nonnegative
    bool independent = false;
    int conditioning_size = 0;
};

// Inverse standard normal CDF, solved to full double precision.
double normal_quantile(double p);

// Partial correlation of variables i and j given S, read off the inverse of
// the correlation submatrix over {i, j} union S (pseudo-inverse when that
// submatrix is singular). Result is clamped to [-1, 1] and symmetric in
// (i, j) bit for bit.
double partial_correlation(const SufficientStats& s, int i, int j, std::span<const int> cond);

// Two-sided test at level alpha. Requires i != j, i and j outside S, and
// n - |S| - 3 >= 1. An absolute partial correlation within 1e-12 of 1 is
// dependent no matter the level.
CITResult independent(const SufficientStats& s, int i, int j, std::span<const int> cond,
                      double alpha);

// Same tests with optional memoization of the partial correlations, used by
// the search algorithms that issue many queries against one matrix. Not
// thread-safe when memoizing; give each worker its own engine.
class CiEngine {
  public:
    explicit CiEngine(const SufficientStats& s, bool memoize = false);

    double partial_corr(int i, int j, std::span<const int> cond) const;
    CITResult test(int i, int j, std::span<const int> cond, double alpha) const;

    const SufficientStats& stats() const { return *stats_; }
    int size() const { return static_cast<int>(stats_->corr.rows()); }

  private:
    const SufficientStats* stats_;
    bool memoize_;
    mutable std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace causal
