#include "causal/ges.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "causal/pattern.hpp"

namespace causal {

namespace {

double r_squared(const SufficientStats& s, int y, std::span<const int> parents, int* pinv) {
    const int k = static_cast<int>(parents.size());
    if (k == 0) return 0.0;
    Eigen::MatrixXd cpp(k, k);
    Eigen::VectorXd cyp(k);
    for (int a = 0; a < k; ++a) {
        cyp(a) = s.corr(y, parents[a]);
        for (int b = 0; b < k; ++b) cpp(a, b) = s.corr(parents[a], parents[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cpp);
    Eigen::VectorXd w;
    if (llt.info() == Eigen::Success) {
        w = llt.solve(cyp);
    } else {
        w = cpp.completeOrthogonalDecomposition().pseudoInverse() * cyp;
        if (pinv) ++*pinv;
    }
    return cyp.dot(w);
}

double local_score(const SufficientStats& s, int y, std::span<const int> parents, int* pinv) {
    const double sigma2 = std::max(1.0 - r_squared(s, y, parents, pinv), 1e-12);
    const double n = static_cast<double>(s.n);
    const double k = static_cast<double>(parents.size());
    return -(n / 2.0) * std::log(sigma2) - ((k + 1.0) / 2.0) * std::log(n);
}

class Scorer {
  public:
    explicit Scorer(const SufficientStats& s)
        : s_(&s), cacheable_(s.corr.rows() <= 56) {}

    // parents must be sorted ascending.
    double local(int y, const std::vector<int>& parents) {
        if (!cacheable_) return local_score(*s_, y, parents, &pinv_);
        std::uint64_t mask = 0;
        for (int v : parents) mask |= std::uint64_t{1} << v;
        const std::uint64_t key = (static_cast<std::uint64_t>(y) << 56) | mask;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const double val = local_score(*s_, y, parents, &pinv_);
        cache_.emplace(key, val);
        return val;
    }

    int pinv_count() const { return pinv_; }

  private:
    const SufficientStats* s_;
    bool cacheable_;
    int pinv_ = 0;
    std::unordered_map<std::uint64_t, double> cache_;
};

std::vector<int> merge_sets(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<int> with_element(const std::vector<int>& a, int x) {
    std::vector<int> out = a;
    out.insert(std::lower_bound(out.begin(), out.end(), x), x);
    return out;
}

std::vector<int> without_element(const std::vector<int>& a, int x) {
    std::vector<int> out = a;
    out.erase(std::remove(out.begin(), out.end(), x), out.end());
    return out;
}

// Neighbors of y (undirected) that are adjacent to x.
std::vector<int> na_set(const Pattern& g, int y, int x) {
    std::vector<int> out;
    for (int v : g.neighbors(y))
        if (v != x && g.adjacent(v, x)) out.push_back(v);
    return out;
}

bool is_clique(const Pattern& g, const std::vector<int>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
            if (!g.adjacent(vs[i], vs[j])) return false;
    return true;
}

// True when every semi-directed path from y to x passes through `block`.
bool paths_blocked(const Pattern& g, int y, int x, const std::vector<int>& block) {
    const int p = g.size();
    std::vector<std::uint8_t> stop(p, 0), seen(p, 0);
    for (int v : block) stop[v] = 1;
    std::vector<int> stack = {y};
    seen[y] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < p; ++w) {
            if (w == v || !(g.directed(v, w) || g.undirected(v, w))) continue;
            if (w == x) return false;
            if (seen[w] || stop[w]) continue;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return true;
}

struct Move {
    int x = -1, y = -1;
    std::vector<int> set;  // sorted
    double delta = 0.0;
};

bool better_than(const Move& a, const Move& b) {
    if (b.x < 0) return true;
    if (a.delta != b.delta) return a.delta > b.delta;
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.set < b.set;
}

// Subsets of `pool` by bitmask; `fn` receives each subset sorted ascending.
template <typename F>
void for_each_subset_of(const std::vector<int>& pool, F&& fn) {
    const std::uint32_t total = std::uint32_t{1} << pool.size();
    std::vector<int> subset;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        subset.clear();
        for (std::size_t t = 0; t < pool.size(); ++t)
            if (mask & (std::uint32_t{1} << t)) subset.push_back(pool[t]);
        fn(subset);
    }
}

Move best_insert(const Pattern& g, Scorer& sc) {
    const int p = g.size();
    Move best;
    for (int x = 0; x < p; ++x)
        for (int y = 0; y < p; ++y) {
            if (x == y || g.adjacent(x, y)) continue;
            const std::vector<int> na = na_set(g, y, x);
            const std::vector<int> pa = g.parents(y);
            std::vector<int> pool;
            for (int t : g.neighbors(y))
                if (t != x && !g.adjacent(t, x)) pool.push_back(t);
            if (pool.size() > 20) continue;  // dense neighborhoods are hopeless anyway
            for_each_subset_of(pool, [&](const std::vector<int>& t_set) {
                const std::vector<int> base = merge_sets(na, t_set);
                if (!is_clique(g, base)) return;
                if (!paths_blocked(g, y, x, base)) return;
                const std::vector<int> old_pa = merge_sets(pa, base);
                const double delta = sc.local(y, with_element(old_pa, x)) - sc.local(y, old_pa);
                Move m{x, y, t_set, delta};
                if (better_than(m, best)) best = std::move(m);
            });
        }
    return best;
}

Move best_delete(const Pattern& g, Scorer& sc) {
    const int p = g.size();
    Move best;
    for (int x = 0; x < p; ++x)
        for (int y = 0; y < p; ++y) {
            if (x == y || !(g.undirected(x, y) || g.directed(x, y))) continue;
            const std::vector<int> na = na_set(g, y, x);
            const std::vector<int> pa = g.parents(y);
            if (na.size() > 20) continue;
            for_each_subset_of(na, [&](const std::vector<int>& h_set) {
                std::vector<int> rest;
                std::set_difference(na.begin(), na.end(), h_set.begin(), h_set.end(),
                                    std::back_inserter(rest));
                if (!is_clique(g, rest)) return;
                const std::vector<int> base = merge_sets(pa, rest);
                const double delta = sc.local(y, without_element(base, x)) -
                                     sc.local(y, with_element(without_element(base, x), x));
                Move m{x, y, h_set, delta};
                if (better_than(m, best)) best = std::move(m);
            });
        }
    return best;
}

void apply_insert(Pattern& g, const Move& m) {
    g.add_directed(m.x, m.y);
    for (int t : m.set) g.add_directed(t, m.y);
}

void apply_delete(Pattern& g, const Move& m) {
    g.clear_edge(m.x, m.y);
    for (int h : m.set) {
        g.add_directed(m.y, h);
        if (g.undirected(m.x, h)) g.add_directed(m.x, h);
    }
}

double pattern_score(const Pattern& g, Scorer& sc) {
    const Pattern dag = dag_extension(g);
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) total += sc.local(i, dag.parents(i));
    return total;
}

}  // namespace

double bic_local(const SufficientStats& s, int y, std::span<const int> parents) {
    return local_score(s, y, parents, nullptr);
}

GesResult ges(const SufficientStats& s) {
    const int p = static_cast<int>(s.corr.rows());
    Scorer sc(s);
    Pattern g(p);

    GesResult res;
    double total = pattern_score(g, sc);
    res.score_trace.push_back(total);

    constexpr double kMinDelta = 1e-9;
    for (;;) {
        const Move m = best_insert(g, sc);
        if (m.x < 0 || m.delta <= kMinDelta) break;
        apply_insert(g, m);
        g = completed_pattern_of_dag(dag_extension(g));
        total = pattern_score(g, sc);
        res.score_trace.push_back(total);
    }
    for (;;) {
        const Move m = best_delete(g, sc);
        if (m.x < 0 || m.delta <= kMinDelta) break;
        apply_delete(g, m);
        g = completed_pattern_of_dag(dag_extension(g));
        total = pattern_score(g, sc);
        res.score_trace.push_back(total);
    }

    res.total_score = total;
    res.pinv_count = sc.pinv_count();
    res.graph = pattern_to_graph(g, s.names);
    return res;
}

}  // namespace causal
