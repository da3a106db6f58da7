#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "causal/graph.hpp"
#include "causal/pc.hpp"

namespace causal {

// Endpoint-mark state for ancestral graph search. mark_at(x, y) is the mark
// sitting at y's end of the edge between x and y.
class PagState {
  public:
    PagState() = default;
    explicit PagState(int p) : p_(p), adj_(p * p, 0), mark_(p * p, Mark::Circle) {}

    int size() const { return p_; }
    bool adjacent(int i, int j) const { return adj_[i * p_ + j] != 0; }
    Mark mark_at(int from, int at) const { return mark_[from * p_ + at]; }
    void set_mark(int from, int at, Mark m) { mark_[from * p_ + at] = m; }

    void add_edge(int i, int j) {
        adj_[i * p_ + j] = adj_[j * p_ + i] = 1;
        mark_[i * p_ + j] = mark_[j * p_ + i] = Mark::Circle;
    }
    void remove_edge(int i, int j) { adj_[i * p_ + j] = adj_[j * p_ + i] = 0; }
    void reset_marks() { std::fill(mark_.begin(), mark_.end(), Mark::Circle); }

    std::vector<int> adjacent_nodes(int i) const;

    // x --> y: tail at x, arrow at y.
    bool parent(int x, int y) const {
        return adjacent(x, y) && mark_at(y, x) == Mark::Tail && mark_at(x, y) == Mark::Arrow;
    }
    // x *-> y: arrow at y.
    bool arrow_into(int x, int y) const { return adjacent(x, y) && mark_at(x, y) == Mark::Arrow; }

  private:
    int p_ = 0;
    std::vector<std::uint8_t> adj_;
    std::vector<Mark> mark_;
};

struct FciOptions {
    double alpha = 0.01;
    int pds_cap = 3;    // largest conditioning set drawn from the reachable set
    int max_cond = -1;  // forwarded to the adjacency search
};

// Collider orientation with circles at every unforced endpoint.
void fci_orient_colliders(PagState& g, const SepSets& seps);

// Reachable-set computation: v is included when some path from source moves
// only through nodes that are colliders on the path or sit in a triangle with
// their path neighbors.
std::vector<int> possible_d_sep(const PagState& g, int source);

// The orientation-propagation rules, one fixpoint pass each; return whether
// anything changed.
bool fci_rule_away_from_collider(PagState& g);     // a *-> b o-* c => b -> c
bool fci_rule_directed_chain(PagState& g);         // a -> b *-> c or a *-> b -> c => a *-> c
bool fci_rule_double_collider(PagState& g);        // paired colliders through a circle node
bool fci_rule_discriminating(PagState& g, const SepSets& seps);
void fci_closure(PagState& g, const SepSets& seps);

// Adjacency search shared with pc_stable, collider orientation, reachable-set
// pruning, re-orientation from scratch, then the rule closure.
MixedGraph fci(const CiEngine& ci, const FciOptions& opt = {});
MixedGraph fci(const SufficientStats& s, const FciOptions& opt = {});

}  // namespace causal
