#include "causal/sem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "causal/rng.hpp"

namespace causal {

namespace {

std::map<std::string, int> index_of(const SemSpec& spec) {
    std::map<std::string, int> idx;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        if (!idx.emplace(spec.nodes[i], static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate node: " + spec.nodes[i]);
    }
    return idx;
}

// Kahn order, preferring the smallest node index at every step.
std::vector<int> topological_order(const SemSpec& spec, const std::map<std::string, int>& idx) {
    const int p = static_cast<int>(spec.nodes.size());
    std::vector<std::vector<int>> children(p);
    std::vector<int> indegree(p, 0);
    for (const auto& e : spec.edges) {
        children[idx.at(e.from)].push_back(idx.at(e.to));
        ++indegree[idx.at(e.to)];
    }
    std::vector<int> order;
    std::vector<bool> emitted(p, false);
    for (int step = 0; step < p; ++step) {
        int pick = -1;
        for (int i = 0; i < p; ++i)
            if (!emitted[i] && indegree[i] == 0) {
                pick = i;
                break;
            }
        if (pick < 0) throw std::invalid_argument("structure contains a directed cycle");
        emitted[pick] = true;
        order.push_back(pick);
        for (int c : children[pick]) --indegree[c];
    }
    return order;
}

}  // namespace

void validate_spec(const SemSpec& spec) {
    const auto idx = index_of(spec);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : spec.edges) {
        if (!idx.count(e.from)) throw std::invalid_argument("edge from unknown node: " + e.from);
        if (!idx.count(e.to)) throw std::invalid_argument("edge to unknown node: " + e.to);
        if (e.from == e.to) throw std::invalid_argument("self loop on node: " + e.from);
        if (!seen.emplace(e.from, e.to).second)
            throw std::invalid_argument("duplicate edge " + e.from + " -> " + e.to);
    }
    for (const auto& l : spec.latent)
        if (!idx.count(l)) throw std::invalid_argument("latent entry names unknown node: " + l);
    topological_order(spec, idx);
}

Table synth_sem(const SemSpec& spec, long n, std::uint64_t seed) {
    validate_spec(spec);
    if (n < 10) throw std::invalid_argument("need at least 10 samples");
    const auto idx = index_of(spec);
    const int p = static_cast<int>(spec.nodes.size());
    const auto order = topological_order(spec, idx);

    std::vector<std::vector<std::pair<int, double>>> parents(p);
    for (const auto& e : spec.edges)
        parents[idx.at(e.to)].push_back({idx.at(e.from), e.weight});

    // Unit-variance noise either way; the uniform branch spans +-sqrt(3).
    const double half_width = std::sqrt(3.0);
    rng::Xoshiro256 g(seed);
    Eigen::MatrixXd all(n, p);
    for (int node : order) {
        for (long r = 0; r < n; ++r) {
            double v = spec.noise == NoiseKind::Gaussian ? rng::normal(g)
                                                         : rng::uniform(g, -half_width, half_width);
            for (const auto& [par, w] : parents[node]) v += w * all(r, par);
            all(r, node) = v;
        }
    }

    Table t;
    t.name = "synthetic";
    t.provenance = "synth_sem(seed=" + std::to_string(seed) + ")";
    std::vector<long> observed;
    for (int i = 0; i < p; ++i)
        if (!spec.latent.count(spec.nodes[i])) {
            t.columns.push_back(Column{spec.nodes[i], Role::Independent});
            observed.push_back(i);
        }
    if (observed.empty()) throw std::invalid_argument("all nodes are latent");
    t.values.resize(n, static_cast<long>(observed.size()));
    for (std::size_t c = 0; c < observed.size(); ++c) t.values.col(static_cast<long>(c)) = all.col(observed[c]);
    return t;
}

Eigen::MatrixXd population_covariance(const SemSpec& spec) {
    validate_spec(spec);
    const auto idx = index_of(spec);
    const int p = static_cast<int>(spec.nodes.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);  // w(i, j): weight of i -> j
    for (const auto& e : spec.edges) w(idx.at(e.from), idx.at(e.to)) = e.weight;
    // x = w^T x + e with unit noise variance, so cov = (I - w^T)^-1 (I - w^T)^-T.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p) - w.transpose();
    Eigen::MatrixXd inv = m.inverse();
    return inv * inv.transpose();
}

SufficientStats population_stats(const SemSpec& spec, long n) {
    const Eigen::MatrixXd cov = population_covariance(spec);
    std::vector<int> observed;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
        if (!spec.latent.count(spec.nodes[i])) observed.push_back(static_cast<int>(i));

    SufficientStats s;
    s.n = n;
    const int m = static_cast<int>(observed.size());
    s.corr.resize(m, m);
    for (int i = 0; i < m; ++i) {
        s.names.push_back(spec.nodes[observed[i]]);
        for (int j = 0; j < m; ++j) {
            const double denom = std::sqrt(cov(observed[i], observed[i]) * cov(observed[j], observed[j]));
            s.corr(i, j) = cov(observed[i], observed[j]) / denom;
        }
        s.corr(i, i) = 1.0;
    }
    return s;
}

MixedGraph spec_dag(const SemSpec& spec) {
    validate_spec(spec);
    std::vector<std::string> observed;
    for (const auto& n : spec.nodes)
        if (!spec.latent.count(n)) observed.push_back(n);
    MixedGraph g(observed);
    for (const auto& e : spec.edges) {
        if (spec.latent.count(e.from) || spec.latent.count(e.to)) continue;
        g.set_edge(e.from, e.to, Mark::Tail, Mark::Arrow, e.weight);
    }
    return g;
}

std::string sem_to_json(const SemSpec& spec, std::optional<std::uint64_t> seed) {
    nlohmann::ordered_json doc;
    doc["nodes"] = spec.nodes;
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : spec.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
    doc["edges"] = std::move(edges);
    doc["noise"] = spec.noise == NoiseKind::Gaussian ? "gaussian" : "uniform";
    doc["latent"] = std::vector<std::string>(spec.latent.begin(), spec.latent.end());
    if (seed) doc["seed"] = *seed;
    return doc.dump(2) + "\n";
}

SemSpec sem_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("structure document is not valid JSON: ") + e.what());
    }
    SemSpec spec;
    for (const auto& n : doc.at("nodes")) spec.nodes.push_back(n.get<std::string>());
    for (const auto& e : doc.at("edges"))
        spec.edges.push_back(SemEdge{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                                     e.value("weight", 1.0)});
    const std::string noise = doc.value("noise", "gaussian");
    if (noise == "gaussian") spec.noise = NoiseKind::Gaussian;
    else if (noise == "uniform") spec.noise = NoiseKind::Uniform;
    else throw DataError("unknown noise kind '" + noise + "'");
    if (doc.contains("latent"))
        for (const auto& l : doc["latent"]) spec.latent.insert(l.get<std::string>());
    validate_spec(spec);
    return spec;
}

SemSpec random_dag_spec(int nodes, double edge_prob, std::uint64_t seed, NoiseKind noise,
                        double weight_lo, double weight_hi) {
    if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
    if (edge_prob < 0.0 || edge_prob > 1.0)
        throw std::invalid_argument("edge probability must lie in [0, 1]");

    int width = 1;
    for (int v = nodes - 1; v >= 10; v /= 10) ++width;

    SemSpec spec;
    spec.noise = noise;
    for (int i = 0; i < nodes; ++i) {
        std::string name = std::to_string(i);
        while (static_cast<int>(name.size()) < width) name.insert(name.begin(), '0');
        spec.nodes.push_back("x" + name);
    }
    rng::Xoshiro256 g(seed);
    for (int i = 0; i < nodes; ++i)
        for (int j = i + 1; j < nodes; ++j) {
            if (rng::uniform01(g) >= edge_prob) continue;
            double w = rng::uniform(g, weight_lo, weight_hi);
            if (g.next() & 1) w = -w;
            spec.edges.push_back(SemEdge{spec.nodes[i], spec.nodes[j], w});
        }
    return spec;
}

}  // namespace causal
