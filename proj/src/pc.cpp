#include "causal/pc.hpp"

#include <algorithm>
#include <functional>

namespace causal {

bool SepSets::contains(int i, int j, int k) const {
    const auto* s = find(i, j);
    return s && std::find(s->begin(), s->end(), k) != s->end();
}

namespace {

// Calls fn(subset) for every size-k subset of the sorted pool, in
// lexicographic order; stops early when fn returns true.
bool for_each_subset(const std::vector<int>& pool, int k, std::vector<int>& subset,
                     const std::function<bool(const std::vector<int>&)>& fn) {
    const int n = static_cast<int>(pool.size());
    if (k > n) return false;
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
        subset.clear();
        for (int i : pick) subset.push_back(pool[i]);
        if (fn(subset)) return true;
        int pos = k - 1;
        while (pos >= 0 && pick[pos] == n - k + pos) --pos;
        if (pos < 0) return false;
        ++pick[pos];
        for (int i = pos + 1; i < k; ++i) pick[i] = pick[i - 1] + 1;
    }
}

}  // namespace

SkeletonResult pc_skeleton(const CiEngine& ci, double alpha, int max_cond) {
    const int p = ci.size();
    const long n = ci.stats().n;

    SkeletonResult res;
    res.adj.assign(p, std::vector<std::uint8_t>(p, 1));
    for (int i = 0; i < p; ++i) res.adj[i][i] = 0;

    // The test degrees of freedom bound the reachable level regardless of any
    // configured cap.
    int level_cap = static_cast<int>(n) - 4;
    if (max_cond >= 0) level_cap = std::min(level_cap, max_cond);

    std::vector<int> subset;
    for (int level = 0; level <= level_cap; ++level) {
        // Neighborhoods frozen per level: deletions inside the level cannot
        // shift anyone else's candidate conditioning sets.
        std::vector<std::vector<int>> snapshot(p);
        bool deeper = false;
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j)
                if (res.adj[i][j]) snapshot[i].push_back(j);
            if (static_cast<int>(snapshot[i].size()) - 1 >= level + 1) deeper = true;
        }

        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                if (i == j || !res.adj[i][j]) continue;
                std::vector<int> pool;
                pool.reserve(snapshot[i].size());
                for (int v : snapshot[i])
                    if (v != j) pool.push_back(v);
                if (static_cast<int>(pool.size()) < level) continue;
                for_each_subset(pool, level, subset, [&](const std::vector<int>& s) {
                    if (!ci.test(i, j, s, alpha).independent) return false;
                    res.adj[i][j] = res.adj[j][i] = 0;
                    res.sepsets.record(i, j, s);
                    return true;
                });
            }
        }
        if (!deeper) break;
    }
    return res;
}

namespace {

// Collider orientation: for every unshielded i - k - j, point both edges at k
// exactly when k separates nothing between i and j. A later triple may
// overwrite an earlier arrow; that conflict is reported, not resolved.
void orient_colliders(Pattern& g, const SepSets& seps, const std::vector<std::string>& names,
                      std::vector<std::string>* conflicts) {
    const int p = g.size();
    auto orient = [&](int from, int to) {
        if (g.directed(to, from)) {
            if (conflicts)
                conflicts->push_back("collider conflict: " + names[from] + " -> " + names[to] +
                                     " overwrites the opposite orientation");
        } else if (g.directed(from, to)) {
            return;
        }
        g.add_directed(from, to);
    };
    for (int k = 0; k < p; ++k)
        for (int i = 0; i < p; ++i) {
            if (i == k || !g.adjacent(i, k)) continue;
            for (int j = i + 1; j < p; ++j) {
                if (j == k || !g.adjacent(j, k) || g.adjacent(i, j)) continue;
                if (!seps.contains(i, j, k)) {
                    orient(i, k);
                    orient(j, k);
                }
            }
        }
}

// Contradictory collider seeds can leave directed cycles; deterministically
// soften the smallest edge on each until the pattern is acyclic again.
void break_directed_cycles(Pattern& g, const std::vector<std::string>& names,
                           std::vector<std::string>* conflicts) {
    const int p = g.size();
    for (;;) {
        std::vector<std::pair<int, int>> cycle_edge;
        for (int i = 0; i < p && cycle_edge.empty(); ++i)
            for (int j = 0; j < p && cycle_edge.empty(); ++j)
                if (g.directed(i, j) && g.directed_path(j, i)) cycle_edge.push_back({i, j});
        if (cycle_edge.empty()) return;
        const auto [i, j] = cycle_edge.front();
        g.add_undirected(i, j);
        if (conflicts)
            conflicts->push_back("collider conflict: cycle broken by undirecting " + names[i] +
                                 " -> " + names[j]);
    }
}

}  // namespace

PcResult pc_stable(const CiEngine& ci, const PcOptions& opt) {
    const int p = ci.size();
    const auto& names = ci.stats().names;
    SkeletonResult sk = pc_skeleton(ci, opt.alpha, opt.max_cond);

    Pattern g(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (sk.adj[i][j]) g.add_undirected(i, j);

    std::vector<std::string> conflicts;
    orient_colliders(g, sk.sepsets, names, &conflicts);
    break_directed_cycles(g, names, &conflicts);
    meek_closure(g, &conflicts);

    return PcResult{pattern_to_graph(g, names), std::move(sk.sepsets), std::move(conflicts)};
}

PcResult pc_stable(const SufficientStats& s, const PcOptions& opt) {
    CiEngine ci(s);
    return pc_stable(ci, opt);
}

}  // namespace causal
