#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace causal {

// Ordinal effect size in [-1, 1]: P(a > b) - P(a < b) over all pairs.
double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b);

// Negligible effect by the conventional 0.147 cutoff.
bool cliffs_small(double delta);

// Studentized bootstrap for a difference in means. Both samples are shifted
// to the pooled mean before resampling; the observed Welch statistic must be
// exceeded in fewer than 5% of resamples for the groups to differ. A zero
// denominator yields t = 0 on equal means and +-inf otherwise.
bool bootstrap_differs(const std::vector<double>& a, const std::vector<double>& b,
                       int resamples = 512, std::uint64_t seed = 0);

// Between-group sum of squares of a two-way split, normalized by the total
// count: (|l1|/|l|)(m1 - m)^2 + (|l2|/|l|)(m2 - m)^2.
double split_improvement(const std::vector<double>& l1, const std::vector<double>& l2);

struct Group {
    std::string label;
    std::vector<double> values;
};

struct RankedGroup {
    int rank = 0;  // 0 is the highest-mean band
    std::string label;
    double mean = 0.0;
    double stdev = 0.0;
};

struct ScottKnottOptions {
    int resamples = 512;
    std::uint64_t seed = 0;
};

// Recursive best-split clustering of groups by mean. Groups sort by
// descending mean (label breaks ties); the split with the largest
// improvement wins; a split only stands when the two sides differ both by
// the bootstrap and by Cliff's delta. Bootstrap seeds derive from the
// segment bounds, so the outcome ignores input order.
std::vector<RankedGroup> scott_knott(std::vector<Group> groups, const ScottKnottOptions& opt = {});

std::string ranks_csv(const std::vector<RankedGroup>& ranks);

}  // namespace causal
