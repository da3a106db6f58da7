#include "causal/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "causal/errors.hpp"

namespace causal {

std::string_view mark_name(Mark m) {
    switch (m) {
        case Mark::Tail: return "tail";
        case Mark::Arrow: return "arrow";
        case Mark::Circle: return "circle";
    }
    return "tail";
}

static std::optional<Mark> mark_from_name(std::string_view s) {
    if (s == "tail") return Mark::Tail;
    if (s == "arrow") return Mark::Arrow;
    if (s == "circle") return Mark::Circle;
    return std::nullopt;
}

MixedGraph::MixedGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto [it, fresh] = index_.emplace(nodes_[i], static_cast<int>(i));
        if (!fresh) throw std::invalid_argument("duplicate node name: " + nodes_[i]);
    }
}

MixedGraph::Key MixedGraph::canonical(const std::string& a, const std::string& b) const {
    if (!index_.count(a)) throw std::invalid_argument("unknown node: " + a);
    if (!index_.count(b)) throw std::invalid_argument("unknown node: " + b);
    if (a == b) throw std::invalid_argument("self loop on node: " + a);
    return a < b ? Key{a, b} : Key{b, a};
}

void MixedGraph::set_edge(const std::string& a, const std::string& b, Mark mark_at_a,
                          Mark mark_at_b, std::optional<double> weight) {
    Key k = canonical(a, b);
    if (k.first != a) std::swap(mark_at_a, mark_at_b);
    edges_[k] = EdgeData{mark_at_a, mark_at_b, weight};
}

void MixedGraph::remove_edge(const std::string& a, const std::string& b) {
    edges_.erase(canonical(a, b));
}

bool MixedGraph::has_edge(const std::string& a, const std::string& b) const {
    return edges_.count(canonical(a, b)) > 0;
}

std::optional<Edge> MixedGraph::edge(const std::string& a, const std::string& b) const {
    auto it = edges_.find(canonical(a, b));
    if (it == edges_.end()) return std::nullopt;
    return Edge{it->first.first, it->first.second, it->second.mark_a, it->second.mark_b,
                it->second.weight};
}

Mark MixedGraph::mark_at(const std::string& at, const std::string& other) const {
    auto it = edges_.find(canonical(at, other));
    if (it == edges_.end()) throw std::invalid_argument("no edge between " + at + " and " + other);
    return at == it->first.first ? it->second.mark_a : it->second.mark_b;
}

std::vector<Edge> MixedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& [k, d] : edges_) out.push_back(Edge{k.first, k.second, d.mark_a, d.mark_b, d.weight});
    return out;
}

std::vector<std::string> MixedGraph::adjacent(const std::string& n) const {
    if (!index_.count(n)) throw std::invalid_argument("unknown node: " + n);
    std::vector<std::string> out;
    for (const auto& [k, d] : edges_) {
        (void)d;
        if (k.first == n) out.push_back(k.second);
        else if (k.second == n) out.push_back(k.first);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool MixedGraph::operator==(const MixedGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
}

EdgeTokenSet canonical_tokens(const MixedGraph& g) {
    EdgeTokenSet out;
    for (const Edge& e : g.edges()) {
        const bool arrow_a = e.mark_a == Mark::Arrow;
        const bool arrow_b = e.mark_b == Mark::Arrow;
        if (arrow_a && arrow_b) out.insert(EdgeToken{TokenKind::Bidirected, e.a, e.b});
        else if (arrow_b) out.insert(EdgeToken{TokenKind::Directed, e.a, e.b});
        else if (arrow_a) out.insert(EdgeToken{TokenKind::Directed, e.b, e.a});
        else out.insert(EdgeToken{TokenKind::Undirected, e.a, e.b});
    }
    return out;
}

// Directed-cycle check over the edges that carry exactly one arrow.
static std::optional<std::string> find_directed_cycle(const MixedGraph& g) {
    const auto& nodes = g.nodes();
    std::unordered_map<std::string, std::vector<std::string>> succ;
    for (const Edge& e : g.edges()) {
        const bool arrow_a = e.mark_a == Mark::Arrow;
        const bool arrow_b = e.mark_b == Mark::Arrow;
        if (arrow_b && !arrow_a) succ[e.a].push_back(e.b);
        else if (arrow_a && !arrow_b) succ[e.b].push_back(e.a);
    }
    enum { White, Grey, Black };
    std::unordered_map<std::string, int> color;
    for (const auto& n : nodes) color[n] = White;

    std::vector<std::pair<std::string, std::size_t>> stack;
    for (const auto& start : nodes) {
        if (color[start] != White) continue;
        stack.push_back({start, 0});
        color[start] = Grey;
        while (!stack.empty()) {
            auto& [cur, idx] = stack.back();
            auto& next = succ[cur];
            if (idx < next.size()) {
                const std::string& w = next[idx++];
                if (color[w] == Grey) return w;
                if (color[w] == White) {
                    color[w] = Grey;
                    stack.push_back({w, 0});
                }
            } else {
                color[cur] = Black;
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

ValidationReport validate(const MixedGraph& g, GraphClaim claim) {
    ValidationReport report;
    switch (claim) {
        case GraphClaim::Dag: {
            for (const Edge& e : g.edges()) {
                const bool directed = (e.mark_a == Mark::Tail && e.mark_b == Mark::Arrow) ||
                                      (e.mark_a == Mark::Arrow && e.mark_b == Mark::Tail);
                if (!directed)
                    report.violations.push_back("edge " + e.a + "--" + e.b +
                                                " is not a directed (tail, arrow) edge");
            }
            if (auto w = find_directed_cycle(g))
                report.violations.push_back("directed cycle through node " + *w);
            break;
        }
        case GraphClaim::Cpdag: {
            for (const Edge& e : g.edges()) {
                if (e.mark_a == Mark::Circle || e.mark_b == Mark::Circle)
                    report.violations.push_back("edge " + e.a + "--" + e.b + " carries a circle mark");
            }
            if (auto w = find_directed_cycle(g))
                report.violations.push_back("directed cycle through node " + *w);
            break;
        }
        case GraphClaim::Pag:
            // Every representable mark is legal; malformed marks cannot be
            // constructed, they are rejected at deserialization.
            break;
    }
    return report;
}

std::string serialize(const MixedGraph& g) {
    nlohmann::ordered_json doc;
    doc["format"] = 1;
    doc["nodes"] = g.nodes();
    auto edges = nlohmann::ordered_json::array();
    for (const Edge& e : g.edges()) {
        nlohmann::ordered_json je;
        je["a"] = e.a;
        je["b"] = e.b;
        je["mark_a"] = std::string(mark_name(e.mark_a));
        je["mark_b"] = std::string(mark_name(e.mark_b));
        if (e.weight) je["weight"] = *e.weight;
        edges.push_back(std::move(je));
    }
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
}

MixedGraph deserialize(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("graph document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
        throw DataError("graph document must contain 'nodes' and 'edges'");
    std::vector<std::string> nodes;
    for (const auto& n : doc["nodes"]) {
        if (!n.is_string()) throw DataError("graph node names must be strings");
        nodes.push_back(n.get<std::string>());
    }
    MixedGraph g(nodes);
    for (const auto& je : doc["edges"]) {
        const auto ma = mark_from_name(je.value("mark_a", ""));
        const auto mb = mark_from_name(je.value("mark_b", ""));
        if (!ma || !mb)
            throw DataError("unknown endpoint mark '" + je.value("mark_a", "") + "'/'" +
                            je.value("mark_b", "") + "'");
        std::optional<double> w;
        if (je.contains("weight")) w = je["weight"].get<double>();
        try {
            g.set_edge(je.at("a").get<std::string>(), je.at("b").get<std::string>(), *ma, *mb, w);
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("bad edge in graph document: ") + e.what());
        }
    }
    return g;
}

std::string to_dot(const MixedGraph& g) {
    std::ostringstream out;
    out << "digraph g {\n";
    for (const auto& n : g.nodes()) out << "  \"" << n << "\";\n";
    for (const EdgeToken& t : canonical_tokens(g)) {
        out << "  \"" << t.a << "\" -> \"" << t.b << "\"";
        if (t.kind == TokenKind::Undirected) out << " [dir=none]";
        else if (t.kind == TokenKind::Bidirected) out << " [dir=both]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace causal
