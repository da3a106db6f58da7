#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

// Mixed graphs with three endpoint marks cover every output family this
// toolkit produces: DAGs and CPDAGs use tail/arrow only, PAGs add circles.

namespace causal {

enum class Mark { Tail, Arrow, Circle };

std::string_view mark_name(Mark m);

struct Edge {
    std::string a, b;  // a < b, the canonical storage order
    Mark mark_a = Mark::Tail;
    Mark mark_b = Mark::Tail;
    std::optional<double> weight;
};

class MixedGraph {
  public:
    MixedGraph() = default;
    explicit MixedGraph(std::vector<std::string> nodes);

    const std::vector<std::string>& nodes() const { return nodes_; }
    bool has_node(const std::string& name) const { return index_.count(name) > 0; }
    std::size_t edge_count() const { return edges_.size(); }

    // Marks are given per endpoint; the pair is canonicalized internally so
    // set_edge("b", "a", m1, m2) and set_edge("a", "b", m2, m1) are the same
    // call. Inserting over an existing edge replaces it.
    void set_edge(const std::string& a, const std::string& b, Mark mark_at_a,
                  Mark mark_at_b, std::optional<double> weight = std::nullopt);
    void remove_edge(const std::string& a, const std::string& b);
    bool has_edge(const std::string& a, const std::string& b) const;
    std::optional<Edge> edge(const std::string& a, const std::string& b) const;

    // Mark at the `at` end of edge {at, other}; edge must exist.
    Mark mark_at(const std::string& at, const std::string& other) const;

    std::vector<Edge> edges() const;                              // sorted by (a, b)
    std::vector<std::string> adjacent(const std::string& n) const;  // sorted

    bool operator==(const MixedGraph& other) const;

  private:
    struct EdgeData {
        Mark mark_a, mark_b;
        std::optional<double> weight;
        bool operator==(const EdgeData&) const = default;
    };
    using Key = std::pair<std::string, std::string>;

    Key canonical(const std::string& a, const std::string& b) const;

    std::vector<std::string> nodes_;
    std::unordered_map<std::string, int> index_;
    std::map<Key, EdgeData> edges_;
};

// Direction-sensitive edge identity. Two graphs share an edge only when the
// canonical token matches exactly, so a flipped arrow counts as a different
// edge; undirected and bidirected tokens keep their endpoints sorted.
enum class TokenKind { Directed, Undirected, Bidirected };

struct EdgeToken {
    TokenKind kind;
    std::string a, b;  // Directed: a -> b; otherwise a < b
    auto operator<=>(const EdgeToken&) const = default;
};

using EdgeTokenSet = std::set<EdgeToken>;

// One token per stored edge: a single arrow yields a directed token, two
// arrows a bidirected one, anything else (circles collapse to tails when not
// opposed by an arrow) an undirected one.
EdgeTokenSet canonical_tokens(const MixedGraph& g);

enum class GraphClaim { Dag, Cpdag, Pag };

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Checks a claimed graph family and reports violations instead of aborting.
ValidationReport validate(const MixedGraph& g, GraphClaim claim);

// JSON round-trip with stable field order: equal graphs serialize to equal
// bytes, weights survive exactly.
std::string serialize(const MixedGraph& g);
MixedGraph deserialize(std::string_view text);

std::string to_dot(const MixedGraph& g);

}  // namespace causal
