#pragma once

#include <string>
#include <vector>

#include "causal/graph.hpp"

// Index-based partially directed graphs: the working representation for
// constraint-based and score-based searches. Conversion to MixedGraph happens
// once, at the end.

namespace causal {

class Pattern {
  public:
    Pattern() = default;
    explicit Pattern(int p) : p_(p), und_(p * p, 0), dir_(p * p, 0) {}

    int size() const { return p_; }

    bool undirected(int i, int j) const { return und_[i * p_ + j] != 0; }
    bool directed(int i, int j) const { return dir_[i * p_ + j] != 0; }  // i -> j
    bool adjacent(int i, int j) const {
        return und_[i * p_ + j] || dir_[i * p_ + j] || dir_[j * p_ + i];
    }

    void add_undirected(int i, int j) {
        clear_edge(i, j);
        und_[i * p_ + j] = und_[j * p_ + i] = 1;
    }
    void add_directed(int i, int j) {
        clear_edge(i, j);
        dir_[i * p_ + j] = 1;
    }
    void clear_edge(int i, int j) {
        und_[i * p_ + j] = und_[j * p_ + i] = 0;
        dir_[i * p_ + j] = dir_[j * p_ + i] = 0;
    }

    std::vector<int> neighbors(int i) const;          // undirected only
    std::vector<int> parents(int i) const;            // j with j -> i
    std::vector<int> adjacent_nodes(int i) const;     // any edge
    std::size_t edge_count() const;

    // True when w is reachable from v along directed edges.
    bool directed_path(int v, int w) const;

    bool operator==(const Pattern&) const = default;

  private:
    int p_ = 0;
    std::vector<std::uint8_t> und_, dir_;
};

// The four orientation-propagation rules for completing a pattern, applied to
// a fixpoint with lexicographic scans. A rule fires only when the new arrow
// would not close a directed cycle; refused applications are logged.
void meek_closure(Pattern& g, std::vector<std::string>* log = nullptr);

// Orients every undirected edge such that no new v-structure appears and the
// result is acyclic (consistent extension). Throws GeneratorError when the
// pattern admits none.
Pattern dag_extension(const Pattern& g);

// Completed pattern of a fully directed acyclic pattern: keep the skeleton,
// direct exactly the v-structure edges, close under the rules.
Pattern completed_pattern_of_dag(const Pattern& dag);

MixedGraph pattern_to_graph(const Pattern& g, const std::vector<std::string>& names);

}  // namespace causal
