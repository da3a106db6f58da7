#include "causal/fci.hpp"

#include <algorithm>

namespace causal {

std::vector<int> PagState::adjacent_nodes(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (adjacent(i, j)) out.push_back(j);
    return out;
}

void fci_orient_colliders(PagState& g, const SepSets& seps) {
    const int p = g.size();
    for (int k = 0; k < p; ++k)
        for (int i = 0; i < p; ++i) {
            if (i == k || !g.adjacent(i, k)) continue;
            for (int j = i + 1; j < p; ++j) {
                if (j == k || !g.adjacent(j, k) || g.adjacent(i, j)) continue;
                if (!seps.contains(i, j, k)) {
                    g.set_mark(i, k, Mark::Arrow);
                    g.set_mark(j, k, Mark::Arrow);
                }
            }
        }
}

std::vector<int> possible_d_sep(const PagState& g, int source) {
    const int p = g.size();
    // States are ordered node pairs (prev, cur); a step prev-cur-next is legal
    // when cur is a collider between the two edges or prev and next are
    // themselves adjacent.
    std::vector<std::uint8_t> visited(p * p, 0);
    std::vector<std::uint8_t> reached(p, 0);
    std::vector<std::pair<int, int>> stack;
    for (int n = 0; n < p; ++n)
        if (g.adjacent(source, n)) {
            visited[source * p + n] = 1;
            reached[n] = 1;
            stack.push_back({source, n});
        }
    while (!stack.empty()) {
        const auto [prev, cur] = stack.back();
        stack.pop_back();
        for (int next = 0; next < p; ++next) {
            if (next == cur || next == prev || !g.adjacent(cur, next)) continue;
            if (visited[cur * p + next]) continue;
            const bool collider = g.mark_at(prev, cur) == Mark::Arrow &&
                                  g.mark_at(next, cur) == Mark::Arrow;
            if (!collider && !g.adjacent(prev, next)) continue;
            visited[cur * p + next] = 1;
            if (next != source) reached[next] = 1;
            stack.push_back({cur, next});
        }
    }
    std::vector<int> out;
    for (int n = 0; n < p; ++n)
        if (reached[n] && n != source) out.push_back(n);
    return out;
}

bool fci_rule_away_from_collider(PagState& g) {
    bool changed = false;
    const int p = g.size();
    for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
            if (b == c || !g.adjacent(b, c) || g.mark_at(c, b) != Mark::Circle) continue;
            for (int a = 0; a < p; ++a) {
                if (a == b || a == c || !g.adjacent(a, b) || g.adjacent(a, c)) continue;
                if (g.mark_at(a, b) != Mark::Arrow) continue;
                g.set_mark(c, b, Mark::Tail);
                g.set_mark(b, c, Mark::Arrow);
                changed = true;
                break;
            }
        }
    return changed;
}

bool fci_rule_directed_chain(PagState& g) {
    bool changed = false;
    const int p = g.size();
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) {
            if (a == c || !g.adjacent(a, c) || g.mark_at(a, c) != Mark::Circle) continue;
            for (int b = 0; b < p; ++b) {
                if (b == a || b == c) continue;
                const bool chain_one = g.parent(a, b) && g.arrow_into(b, c);
                const bool chain_two = g.arrow_into(a, b) && g.parent(b, c);
                if (chain_one || chain_two) {
                    g.set_mark(a, c, Mark::Arrow);
                    changed = true;
                    break;
                }
            }
        }
    return changed;
}

bool fci_rule_double_collider(PagState& g) {
    bool changed = false;
    const int p = g.size();
    // a *-> b <-* c with a o-o d o-o c (circles at d) and d o-* b: the d-b
    // edge gains an arrow at b.
    for (int d = 0; d < p; ++d)
        for (int b = 0; b < p; ++b) {
            if (d == b || !g.adjacent(d, b) || g.mark_at(d, b) != Mark::Circle) continue;
            bool fired = false;
            for (int a = 0; a < p && !fired; ++a) {
                if (a == d || a == b || !g.adjacent(a, b) || !g.adjacent(a, d)) continue;
                if (g.mark_at(a, b) != Mark::Arrow || g.mark_at(a, d) != Mark::Circle) continue;
                for (int c = 0; c < p && !fired; ++c) {
                    if (c == a || c == b || c == d || g.adjacent(a, c)) continue;
                    if (!g.adjacent(c, b) || !g.adjacent(c, d)) continue;
                    if (g.mark_at(c, b) != Mark::Arrow || g.mark_at(c, d) != Mark::Circle) continue;
                    g.set_mark(d, b, Mark::Arrow);
                    changed = true;
                    fired = true;
                }
            }
        }
    return changed;
}

namespace {

// Depth-first search for a discriminating path ending with <..., a, b, c>:
// every interior node is a collider on the path and a parent of c, and the
// far endpoint is nonadjacent to c.
struct DiscriminatingSearch {
    const PagState& g;
    const SepSets& seps;
    int a, b, c;
    std::vector<std::uint8_t> on_path;

    bool apply(PagState& out, int theta) const {
        if (seps.contains(theta, c, b)) {
            out.set_mark(c, b, Mark::Tail);
            out.set_mark(b, c, Mark::Arrow);
        } else {
            // Collider at b between its path predecessor and c.
            out.set_mark(a, b, Mark::Arrow);
            out.set_mark(c, b, Mark::Arrow);
            out.set_mark(b, c, Mark::Arrow);
        }
        return true;
    }

    // `cur` is the interior node closest to the unexplored end; extend with
    // predecessors l with l *-> cur.
    bool extend(PagState& out, int cur) {
        const int p = g.size();
        for (int l = 0; l < p; ++l) {
            if (on_path[l] || l == c || !g.adjacent(l, cur)) continue;
            if (g.mark_at(l, cur) != Mark::Arrow) continue;
            if (!g.adjacent(l, c)) {
                // Found the far endpoint.
                return apply(out, l);
            }
            // To continue, l must itself be an interior node: a collider on
            // the path (arrow back at l) and a parent of c.
            if (g.mark_at(cur, l) != Mark::Arrow) continue;
            if (!g.parent(l, c)) continue;
            on_path[l] = 1;
            if (extend(out, l)) return true;
            on_path[l] = 0;
        }
        return false;
    }
};

}  // namespace

bool fci_rule_discriminating(PagState& g, const SepSets& seps) {
    bool changed = false;
    const int p = g.size();
    for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
            if (b == c || !g.adjacent(b, c) || g.mark_at(c, b) != Mark::Circle) continue;
            // The path's interior neighbor of b must be a collider on the
            // path (arrow into it from b's side) and a parent of c.
            for (int a = 0; a < p; ++a) {
                if (a == b || a == c || !g.adjacent(a, b)) continue;
                if (g.mark_at(b, a) != Mark::Arrow) continue;
                if (!g.parent(a, c)) continue;
                DiscriminatingSearch search{g, seps, a, b, c, std::vector<std::uint8_t>(p, 0)};
                search.on_path[b] = 1;
                search.on_path[a] = 1;
                if (search.extend(g, a)) {
                    changed = true;
                    break;
                }
            }
        }
    return changed;
}

void fci_closure(PagState& g, const SepSets& seps) {
    bool changed = true;
    while (changed) {
        changed = false;
        changed |= fci_rule_away_from_collider(g);
        changed |= fci_rule_directed_chain(g);
        changed |= fci_rule_double_collider(g);
        changed |= fci_rule_discriminating(g, seps);
    }
}

MixedGraph fci(const CiEngine& ci, const FciOptions& opt) {
    const int p = ci.size();
    const auto& names = ci.stats().names;

    SkeletonResult sk = pc_skeleton(ci, opt.alpha, opt.max_cond);
    PagState g(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (sk.adj[i][j]) g.add_edge(i, j);
    fci_orient_colliders(g, sk.sepsets);

    // Prune with conditioning sets drawn from the reachable sets, which can
    // separate pairs that no shared neighborhood could.
    SepSets seps = std::move(sk.sepsets);
    std::vector<int> subset;
    const long n = ci.stats().n;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            if (!g.adjacent(i, j)) continue;
            bool removed = false;
            for (int side = 0; side < 2 && !removed; ++side) {
                const int source = side == 0 ? i : j;
                std::vector<int> pool = possible_d_sep(g, source);
                pool.erase(std::remove_if(pool.begin(), pool.end(),
                                          [&](int v) { return v == i || v == j; }),
                           pool.end());
                for (int size = 1; size <= opt.pds_cap && !removed; ++size) {
                    if (static_cast<int>(pool.size()) < size) break;
                    if (n - size - 3 < 1) break;
                    std::vector<int> pick(size);
                    for (int t = 0; t < size; ++t) pick[t] = t;
                    for (;;) {
                        subset.clear();
                        for (int t : pick) subset.push_back(pool[t]);
                        if (ci.test(i, j, subset, opt.alpha).independent) {
                            g.remove_edge(i, j);
                            seps.record(i, j, subset);
                            removed = true;
                            break;
                        }
                        int pos = size - 1;
                        const int m = static_cast<int>(pool.size());
                        while (pos >= 0 && pick[pos] == m - size + pos) --pos;
                        if (pos < 0) break;
                        ++pick[pos];
                        for (int t = pos + 1; t < size; ++t) pick[t] = pick[t - 1] + 1;
                    }
                }
            }
        }

    // Orientations predating the pruning are stale; rebuild them against the
    // final adjacencies and separating sets.
    g.reset_marks();
    fci_orient_colliders(g, seps);
    fci_closure(g, seps);

    MixedGraph out(names);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (g.adjacent(i, j)) out.set_edge(names[i], names[j], g.mark_at(j, i), g.mark_at(i, j));
    return out;
}

MixedGraph fci(const SufficientStats& s, const FciOptions& opt) {
    CiEngine ci(s);
    return fci(ci, opt);
}

}  // namespace causal
