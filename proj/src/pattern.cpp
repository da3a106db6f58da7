#include "causal/pattern.hpp"

#include <algorithm>

#include "causal/errors.hpp"

namespace causal {

std::vector<int> Pattern::neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (undirected(i, j)) out.push_back(j);
    return out;
}

std::vector<int> Pattern::parents(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (directed(j, i)) out.push_back(j);
    return out;
}

std::vector<int> Pattern::adjacent_nodes(int i) const {
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (j != i && adjacent(i, j)) out.push_back(j);
    return out;
}

std::size_t Pattern::edge_count() const {
    std::size_t n = 0;
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j)
            if (adjacent(i, j)) ++n;
    return n;
}

bool Pattern::directed_path(int v, int w) const {
    if (v == w) return true;
    std::vector<std::uint8_t> seen(p_, 0);
    std::vector<int> stack{v};
    seen[v] = 1;
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        for (int nxt = 0; nxt < p_; ++nxt) {
            if (!directed(cur, nxt) || seen[nxt]) continue;
            if (nxt == w) return true;
            seen[nxt] = 1;
            stack.push_back(nxt);
        }
    }
    return false;
}

namespace {

// Orient i -> j unless the arrow would close a directed cycle, which can only
// happen downstream of contradictory collider seeds.
bool safe_orient(Pattern& g, int i, int j, const char* rule, std::vector<std::string>* log) {
    if (g.directed_path(j, i)) {
        if (log)
            log->push_back(std::string(rule) + " skipped: orienting " + std::to_string(i) + " -> " +
                           std::to_string(j) + " would close a directed cycle");
        return false;
    }
    g.add_directed(i, j);
    return true;
}

// a -> b, b - c, a and c nonadjacent  =>  b -> c
bool rule_one(Pattern& g, std::vector<std::string>* log) {
    bool changed = false;
    const int p = g.size();
    for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
            if (b == c || !g.undirected(b, c)) continue;
            for (int a = 0; a < p; ++a) {
                if (a == b || a == c) continue;
                if (g.directed(a, b) && !g.adjacent(a, c)) {
                    changed |= safe_orient(g, b, c, "rule 1", log);
                    break;
                }
            }
        }
    return changed;
}

// a -> b -> c with a - c  =>  a -> c
bool rule_two(Pattern& g, std::vector<std::string>* log) {
    bool changed = false;
    const int p = g.size();
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) {
            if (a == c || !g.undirected(a, c)) continue;
            for (int b = 0; b < p; ++b) {
                if (b == a || b == c) continue;
                if (g.directed(a, b) && g.directed(b, c)) {
                    changed |= safe_orient(g, a, c, "rule 2", log);
                    break;
                }
            }
        }
    return changed;
}

// a - b with a - c -> b and a - d -> b, c and d nonadjacent  =>  a -> b
bool rule_three(Pattern& g, std::vector<std::string>* log) {
    bool changed = false;
    const int p = g.size();
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
            if (a == b || !g.undirected(a, b)) continue;
            bool done = false;
            for (int c = 0; c < p && !done; ++c) {
                if (c == a || c == b || !g.undirected(a, c) || !g.directed(c, b)) continue;
                for (int d = c + 1; d < p && !done; ++d) {
                    if (d == a || d == b || !g.undirected(a, d) || !g.directed(d, b)) continue;
                    if (g.adjacent(c, d)) continue;
                    changed |= safe_orient(g, a, b, "rule 3", log);
                    done = true;
                }
            }
        }
    return changed;
}

// a - b with a chain c -> d -> b, a adjacent to both c and d, b and c
// nonadjacent  =>  a -> b. Orienting b -> a instead would either close a
// directed cycle through d or create a fresh unshielded collider at a.
bool rule_four(Pattern& g, std::vector<std::string>* log) {
    bool changed = false;
    const int p = g.size();
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
            if (a == b || !g.undirected(a, b)) continue;
            bool done = false;
            for (int d = 0; d < p && !done; ++d) {
                if (d == a || d == b || !g.directed(d, b) || !g.adjacent(a, d)) continue;
                for (int c = 0; c < p && !done; ++c) {
                    if (c == a || c == b || c == d) continue;
                    if (!g.directed(c, d) || !g.adjacent(a, c) || g.adjacent(b, c)) continue;
                    changed |= safe_orient(g, a, b, "rule 4", log);
                    done = true;
                }
            }
        }
    return changed;
}

}  // namespace

void meek_closure(Pattern& g, std::vector<std::string>* log) {
    bool changed = true;
    while (changed) {
        changed = false;
        changed |= rule_one(g, log);
        changed |= rule_two(g, log);
        changed |= rule_three(g, log);
        changed |= rule_four(g, log);
    }
}

Pattern dag_extension(const Pattern& g) {
    const int p = g.size();
    Pattern work = g;
    Pattern out = g;
    std::vector<std::uint8_t> removed(p, 0);

    for (int step = 0; step < p; ++step) {
        int sink = -1;
        for (int x = 0; x < p && sink < 0; ++x) {
            if (removed[x]) continue;
            bool has_out = false;
            for (int y = 0; y < p; ++y)
                if (!removed[y] && work.directed(x, y)) {
                    has_out = true;
                    break;
                }
            if (has_out) continue;
            // Every undirected neighbor must see all other adjacents of x,
            // otherwise orienting into x would create a fresh collider.
            bool ok = true;
            for (int w = 0; w < p && ok; ++w) {
                if (removed[w] || !work.undirected(x, w)) continue;
                for (int z = 0; z < p && ok; ++z) {
                    if (removed[z] || z == w || z == x || !work.adjacent(x, z)) continue;
                    if (!work.adjacent(w, z)) ok = false;
                }
            }
            if (ok) sink = x;
        }
        if (sink < 0) throw GeneratorError("pattern admits no acyclic extension");
        for (int w = 0; w < p; ++w)
            if (!removed[w] && work.undirected(sink, w)) out.add_directed(w, sink);
        removed[sink] = 1;
    }
    return out;
}

Pattern completed_pattern_of_dag(const Pattern& dag) {
    const int p = dag.size();
    Pattern out(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (dag.adjacent(i, j)) out.add_undirected(i, j);
    for (int k = 0; k < p; ++k) {
        const auto pars = dag.parents(k);
        for (std::size_t u = 0; u < pars.size(); ++u)
            for (std::size_t v = u + 1; v < pars.size(); ++v)
                if (!dag.adjacent(pars[u], pars[v])) {
                    out.add_directed(pars[u], k);
                    out.add_directed(pars[v], k);
                }
    }
    meek_closure(out);
    return out;
}

MixedGraph pattern_to_graph(const Pattern& g, const std::vector<std::string>& names) {
    MixedGraph out(names);
    const int p = g.size();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            if (g.undirected(i, j)) out.set_edge(names[i], names[j], Mark::Tail, Mark::Tail);
            else if (g.directed(i, j)) out.set_edge(names[i], names[j], Mark::Tail, Mark::Arrow);
            else if (g.directed(j, i)) out.set_edge(names[i], names[j], Mark::Arrow, Mark::Tail);
        }
    return out;
}

}  // namespace causal
