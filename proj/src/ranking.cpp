#include "causal/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "causal/rng.hpp"

namespace causal {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    return sq / static_cast<double>(v.size() - 1);
}

double welch_t(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean_of(a), mb = mean_of(b);
    const double denom = std::sqrt(sample_var(a, ma) / static_cast<double>(a.size()) +
                                   sample_var(b, mb) / static_cast<double>(b.size()));
    if (denom == 0.0) {
        if (ma == mb) return 0.0;
        return ma > mb ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return (ma - mb) / denom;
}

}  // namespace

double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
    long more = 0, less = 0;
    for (double x : a)
        for (double y : b) {
            if (x > y) ++more;
            if (x < y) ++less;
        }
    return static_cast<double>(more - less) / (static_cast<double>(a.size()) * b.size());
}

bool cliffs_small(double delta) { return std::abs(delta) < 0.147; }

bool bootstrap_differs(const std::vector<double>& a, const std::vector<double>& b, int resamples,
                       std::uint64_t seed) {
    const double observed = std::abs(welch_t(a, b));
    const double pooled =
        (std::accumulate(a.begin(), a.end(), 0.0) + std::accumulate(b.begin(), b.end(), 0.0)) /
        static_cast<double>(a.size() + b.size());
    std::vector<double> a0(a), b0(b);
    const double ma = mean_of(a), mb = mean_of(b);
    for (double& x : a0) x += pooled - ma;
    for (double& x : b0) x += pooled - mb;

    rng::Xoshiro256 gen(seed);
    std::vector<double> ra(a.size()), rb(b.size());
    int exceed = 0;
    for (int r = 0; r < resamples; ++r) {
        for (double& x : ra) x = a0[rng::bounded(gen, a0.size())];
        for (double& x : rb) x = b0[rng::bounded(gen, b0.size())];
        if (std::abs(welch_t(ra, rb)) >= observed) ++exceed;
    }
    return exceed < resamples * 0.05;
}

double split_improvement(const std::vector<double>& l1, const std::vector<double>& l2) {
    const double n1 = static_cast<double>(l1.size());
    const double n2 = static_cast<double>(l2.size());
    const double m1 = mean_of(l1);
    const double m2 = mean_of(l2);
    const double m = (n1 * m1 + n2 * m2) / (n1 + n2);
    return (n1 / (n1 + n2)) * (m1 - m) * (m1 - m) + (n2 / (n1 + n2)) * (m2 - m) * (m2 - m);
}

namespace {

struct SortedGroup {
    const Group* g;
    double mean;
};

// Bands are contiguous runs of the sorted groups; splitting recurses only
// when the division is both significant and non-negligible.
void find_bands(const std::vector<SortedGroup>& gs, int lo, int hi,
                const ScottKnottOptions& opt, std::vector<int>& band_starts) {
    if (hi - lo <= 1) return;
    double best = -1.0;
    int best_k = -1;
    std::vector<double> means1, means2;
    for (int k = lo + 1; k < hi; ++k) {
        means1.clear();
        means2.clear();
        for (int i = lo; i < k; ++i) means1.push_back(gs[i].mean);
        for (int i = k; i < hi; ++i) means2.push_back(gs[i].mean);
        const double imp = split_improvement(means1, means2);
        if (imp > best) {
            best = imp;
            best_k = k;
        }
    }

    std::vector<double> pool1, pool2;
    for (int i = lo; i < best_k; ++i)
        pool1.insert(pool1.end(), gs[i].g->values.begin(), gs[i].g->values.end());
    for (int i = best_k; i < hi; ++i)
        pool2.insert(pool2.end(), gs[i].g->values.begin(), gs[i].g->values.end());
    const std::uint64_t seed =
        rng::derive_seed(opt.seed, static_cast<std::uint64_t>(lo) * 1000 + hi);
    if (!bootstrap_differs(pool1, pool2, opt.resamples, seed)) return;
    if (cliffs_small(cliffs_delta(pool1, pool2))) return;

    band_starts.push_back(best_k);
    find_bands(gs, lo, best_k, opt, band_starts);
    find_bands(gs, best_k, hi, opt, band_starts);
}

}  // namespace

std::vector<RankedGroup> scott_knott(std::vector<Group> groups, const ScottKnottOptions& opt) {
    std::vector<SortedGroup> gs;
    gs.reserve(groups.size());
    for (const Group& g : groups)
        if (!g.values.empty()) gs.push_back({&g, mean_of(g.values)});
    std::sort(gs.begin(), gs.end(), [](const SortedGroup& a, const SortedGroup& b) {
        if (a.mean != b.mean) return a.mean > b.mean;
        return a.g->label < b.g->label;
    });

    std::vector<int> band_starts = {0};
    find_bands(gs, 0, static_cast<int>(gs.size()), opt, band_starts);
    std::sort(band_starts.begin(), band_starts.end());

    std::vector<RankedGroup> out;
    out.reserve(gs.size());
    int rank = -1;
    std::size_t next_band = 0;
    for (int i = 0; i < static_cast<int>(gs.size()); ++i) {
        if (next_band < band_starts.size() && band_starts[next_band] == i) {
            ++rank;
            ++next_band;
        }
        const double m = gs[i].mean;
        out.push_back({rank, gs[i].g->label, m, std::sqrt(sample_var(gs[i].g->values, m))});
    }
    return out;
}

std::string ranks_csv(const std::vector<RankedGroup>& ranks) {
    std::string out = "rank,group,mean,stdev\n";
    char buf[64];
    for (const RankedGroup& r : ranks) {
        std::snprintf(buf, sizeof buf, "%d,%s,%.2f,%.2f\n", r.rank, r.label.c_str(), r.mean,
                      r.stdev);
        out += buf;
    }
    return out;
}

}  // namespace causal
