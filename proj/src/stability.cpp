#include "causal/stability.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>
#include <tuple>

#include "causal/errors.hpp"
#include "causal/fci.hpp"
#include "causal/ges.hpp"
#include "causal/lingam.hpp"
#include "causal/pc.hpp"
#include "causal/rng.hpp"

namespace causal {

MixedGraph PcGenerator::run(const Table& t, std::uint64_t) const {
    PcOptions opt;
    opt.alpha = alpha_;
    opt.max_cond = max_cond_;
    return pc_stable(sufficient_stats(t), opt).graph;
}

MixedGraph FciGenerator::run(const Table& t, std::uint64_t) const {
    FciOptions opt;
    opt.alpha = alpha_;
    opt.pds_cap = pds_cap_;
    return fci(sufficient_stats(t), opt);
}

MixedGraph GesGenerator::run(const Table& t, std::uint64_t) const {
    return ges(sufficient_stats(t)).graph;
}

MixedGraph LingamGenerator::run(const Table& t, std::uint64_t seed) const {
    return ica_lingam(t, seed, prune_).graph;
}

std::vector<std::unique_ptr<Generator>> make_default_generators() {
    std::vector<std::unique_ptr<Generator>> out;
    out.push_back(std::make_unique<PcGenerator>());
    out.push_back(std::make_unique<FciGenerator>());
    out.push_back(std::make_unique<GesGenerator>());
    out.push_back(std::make_unique<LingamGenerator>());
    return out;
}

double jaccard(const EdgeTokenSet& a, const EdgeTokenSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++inter;
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

namespace {

// Runs fn(ctx, i) for every i on up to `jobs` threads, one ctx per thread.
// Results land at their index, so the merge order never depends on
// scheduling. fn must not throw.
template <typename R, typename MakeCtx, typename Fn>
std::vector<R> parallel_indexed(int count, int jobs, MakeCtx&& make_ctx, Fn&& fn) {
    std::vector<R> out(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0) return out;
    const int workers = std::max(1, std::min(jobs, count));
    if (workers == 1) {
        auto ctx = make_ctx();
        for (int i = 0; i < count; ++i) out[i] = fn(ctx, i);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            auto ctx = make_ctx();
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                out[i] = fn(ctx, i);
            }
        });
    for (auto& th : pool) th.join();
    return out;
}

struct RunCell {
    bool ok = false;
    EdgeTokenSet tokens;
    std::size_t edges = 0;
    std::string error;
};

RunCell run_cell(const Generator& gen, const Table& t, std::uint64_t seed) {
    RunCell c;
    try {
        const MixedGraph g = gen.run(t, seed);
        c.tokens = canonical_tokens(g);
        c.edges = g.edge_count();
        c.ok = true;
    } catch (const std::exception& e) {
        c.error = e.what();
    }
    return c;
}

std::string double_repr(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string two_decimals(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

Table restrict_table(const Table& t, const std::vector<std::string>& names) {
    Table out;
    out.name = t.name;
    out.provenance = t.provenance;
    out.cleaning = t.cleaning;
    out.values.resize(t.values.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        const int idx = t.column_index(names[k]);
        out.columns.push_back(t.columns[idx]);
        out.values.col(static_cast<Eigen::Index>(k)) = t.values.col(idx);
    }
    return out;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ComparisonRow>& rows) {
    std::vector<SummaryRow> out;
    std::vector<std::vector<double>> vals;
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> pos;
    for (const ComparisonRow& r : rows) {
        const auto key = std::make_tuple(r.dataset, r.protocol, r.generator);
        auto it = pos.find(key);
        if (it == pos.end()) {
            it = pos.emplace(key, out.size()).first;
            out.push_back({r.dataset, r.protocol, r.generator, 0.0, 0.0});
            vals.emplace_back();
        }
        vals[it->second].push_back(r.jaccard);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& v = vals[i];
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double sq = 0.0;
        for (double x : v) sq += (x - mean) * (x - mean);
        out[i].mean = mean;
        out[i].stdev = v.size() < 2 ? 0.0 : std::sqrt(sq / static_cast<double>(v.size() - 1));
    }
    return out;
}

StabilityReport run_releases(const Generator& gen, const std::vector<Table>& tables,
                             const AuditOptions& opt) {
    StabilityReport rep;
    const int n = static_cast<int>(tables.size());
    rep.planned = n > 1 ? static_cast<std::size_t>(n - 1) : 0;
    if (n < 2) {
        rep.warnings.push_back("releases: need at least two tables");
        return rep;
    }
    const auto cells = parallel_indexed<RunCell>(
        n, opt.jobs, [] { return 0; },
        [&](int&, int i) {
            return run_cell(gen, tables[i], rng::derive_seed(opt.seed, static_cast<std::uint64_t>(i)));
        });
    for (int i = 0; i < n; ++i)
        if (!cells[i].ok)
            rep.warnings.push_back("releases: " + tables[i].name + ": " + cells[i].error);
    for (int i = 0; i + 1 < n; ++i) {
        if (!cells[i].ok || !cells[i + 1].ok) continue;
        rep.rows.push_back({"releases", tables[0].name, gen.name(), "", tables[i].name,
                            tables[i + 1].name, jaccard(cells[i].tokens, cells[i + 1].tokens)});
    }
    rep.summary = summarize(rep.rows);
    return rep;
}

StabilityReport run_projects(const Generator& gen, const std::vector<Table>& tables,
                             const AuditOptions& opt) {
    StabilityReport rep;
    const int n = static_cast<int>(tables.size());
    rep.planned = static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
    if (n < 2) {
        rep.warnings.push_back("projects: need at least two tables");
        return rep;
    }

    // Base column set: the most frequent exact header, earliest table winning
    // ties; then a running intersection over the inputs.
    std::map<std::vector<std::string>, int> freq;
    for (const Table& t : tables) ++freq[t.column_names()];
    std::vector<std::string> common;
    int best_count = 0;
    for (const Table& t : tables) {
        const auto names = t.column_names();
        const int c = freq[names];
        if (c > best_count) {
            best_count = c;
            common = names;
        }
    }
    std::vector<int> kept;
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> inter;
        for (const std::string& name : common)
            if (tables[i].column_index(name) >= 0) inter.push_back(name);
        if (inter.size() < 2) {
            rep.warnings.push_back("projects: " + tables[i].name +
                                   " excluded: fewer than two shared columns");
            continue;
        }
        common = std::move(inter);
        kept.push_back(i);
    }
    if (kept.size() < 2) {
        rep.warnings.push_back("projects: fewer than two tables share a column set");
        rep.summary = summarize(rep.rows);
        return rep;
    }

    std::vector<Table> aligned;
    aligned.reserve(kept.size());
    for (int i : kept) aligned.push_back(restrict_table(tables[i], common));

    const auto cells = parallel_indexed<RunCell>(
        static_cast<int>(aligned.size()), opt.jobs, [] { return 0; },
        [&](int&, int k) {
            return run_cell(gen, aligned[k],
                            rng::derive_seed(opt.seed, static_cast<std::uint64_t>(kept[k])));
        });
    for (std::size_t k = 0; k < aligned.size(); ++k)
        if (!cells[k].ok)
            rep.warnings.push_back("projects: " + aligned[k].name + ": " + cells[k].error);
    for (std::size_t a = 0; a < aligned.size(); ++a)
        for (std::size_t b = a + 1; b < aligned.size(); ++b) {
            if (!cells[a].ok || !cells[b].ok) continue;
            rep.rows.push_back({"projects", "all", gen.name(), "", aligned[a].name,
                                aligned[b].name, jaccard(cells[a].tokens, cells[b].tokens)});
        }
    rep.summary = summarize(rep.rows);
    return rep;
}

StabilityReport run_alpha_sweep(const std::vector<Table>& tables, const AuditOptions& opt) {
    StabilityReport rep;
    const int pts = opt.sweep_points;
    rep.planned = tables.size() * static_cast<std::size_t>(std::max(0, pts - 1));
    const auto alpha_of = [&](int i) { return (i + 1) / static_cast<double>(pts + 1); };

    for (const Table& t : tables) {
        const SufficientStats s = sufficient_stats(t);
        const auto cells = parallel_indexed<RunCell>(
            pts, opt.jobs, [&] { return CiEngine(s, true); },
            [&](CiEngine& ci, int i) {
                RunCell c;
                try {
                    PcOptions po;
                    po.alpha = alpha_of(i);
                    po.max_cond = opt.sweep_max_cond;
                    const MixedGraph g = pc_stable(ci, po).graph;
                    c.tokens = canonical_tokens(g);
                    c.edges = g.edge_count();
                    c.ok = true;
                } catch (const std::exception& e) {
                    c.error = e.what();
                }
                return c;
            });

        for (int i = 0; i < pts; ++i) {
            if (!cells[i].ok) continue;
            rep.graph_stats.push_back(
                {t.name + "@" + double_repr(alpha_of(i)), alpha_of(i), cells[i].edges});
        }
        if (!cells[0].ok) {
            rep.warnings.push_back("alpha-sweep: " + t.name +
                                   ": baseline failed: " + cells[0].error);
            continue;
        }
        const std::string base_id = double_repr(alpha_of(0));
        for (int i = 1; i < pts; ++i) {
            if (!cells[i].ok) {
                rep.warnings.push_back("alpha-sweep: " + t.name + ": point " +
                                       double_repr(alpha_of(i)) + " failed: " + cells[i].error);
                continue;
            }
            rep.rows.push_back({"alpha-sweep", t.name, "pc", double_repr(alpha_of(i)), base_id,
                                double_repr(alpha_of(i)),
                                jaccard(cells[0].tokens, cells[i].tokens)});
        }
    }
    rep.summary = summarize(rep.rows);
    return rep;
}

StabilityReport run_subsample(const Generator& gen, const std::vector<Table>& tables,
                              const AuditOptions& opt) {
    StabilityReport rep;
    const int runs = opt.subsample_runs;
    rep.planned = tables.size() * static_cast<std::size_t>(std::max(0, runs - 1));

    for (const Table& t : tables) {
        const auto cells = parallel_indexed<RunCell>(
            runs, opt.jobs, [] { return 0; },
            [&](int&, int k) {
                RunCell c;
                const std::uint64_t seed = rng::derive_seed(opt.seed, static_cast<std::uint64_t>(k));
                try {
                    const Table sub = subsample(t, opt.subsample_fraction, seed);
                    const MixedGraph g = gen.run(sub, seed);
                    c.tokens = canonical_tokens(g);
                    c.edges = g.edge_count();
                    c.ok = true;
                } catch (const std::exception& e) {
                    c.error = e.what();
                }
                return c;
            });
        if (!cells[0].ok) {
            rep.warnings.push_back("subsample: " + t.name +
                                   ": reference run failed: " + cells[0].error);
            continue;
        }
        const std::string frac = double_repr(opt.subsample_fraction);
        for (int k = 1; k < runs; ++k) {
            if (!cells[k].ok) {
                rep.warnings.push_back("subsample: " + t.name + ": run " + std::to_string(k) +
                                       " skipped: " + cells[k].error);
                continue;
            }
            rep.rows.push_back({"subsample", t.name, gen.name(), frac, "run0",
                                "run" + std::to_string(k),
                                jaccard(cells[0].tokens, cells[k].tokens)});
        }
    }
    rep.summary = summarize(rep.rows);
    return rep;
}

StabilityReport run_cross_generator(const std::vector<Table>& tables, const AuditOptions& opt) {
    StabilityReport rep;
    rep.planned = static_cast<std::size_t>(std::max(0, opt.cross_trials));
    if (tables.empty()) {
        rep.warnings.push_back("cross-generator: no tables");
        return rep;
    }
    const auto gens = make_default_generators();

    struct TrialCell {
        bool ok = false;
        ComparisonRow row;
        std::vector<std::string> warnings;
    };
    constexpr int kAttempts = 8;
    const auto cells = parallel_indexed<TrialCell>(
        opt.cross_trials, opt.jobs, [] { return 0; },
        [&](int&, int trial) {
            TrialCell c;
            for (int attempt = 0; attempt < kAttempts; ++attempt) {
                rng::Xoshiro256 g(rng::derive_seed(
                    opt.seed, static_cast<std::uint64_t>(trial) * 101 + attempt));
                const auto ti = static_cast<std::size_t>(rng::bounded(g, tables.size()));
                const auto a = static_cast<std::size_t>(rng::bounded(g, gens.size()));
                auto b = static_cast<std::size_t>(rng::bounded(g, gens.size() - 1));
                if (b >= a) ++b;
                const std::string pair_name = gens[a]->name() + "|" + gens[b]->name();
                try {
                    const std::uint64_t seed =
                        rng::derive_seed(opt.seed, static_cast<std::uint64_t>(trial));
                    const MixedGraph ga = gens[a]->run(tables[ti], seed);
                    const MixedGraph gb = gens[b]->run(tables[ti], seed);
                    c.row = {"cross-generator",  tables[ti].name,  pair_name,
                             std::to_string(trial), gens[a]->name(), gens[b]->name(),
                             jaccard(canonical_tokens(ga), canonical_tokens(gb))};
                    c.ok = true;
                    return c;
                } catch (const std::exception& e) {
                    c.warnings.push_back("cross-generator: trial " + std::to_string(trial) +
                                         " attempt " + std::to_string(attempt) + " (" +
                                         tables[ti].name + ", " + pair_name + "): " + e.what());
                }
            }
            c.warnings.push_back("cross-generator: trial " + std::to_string(trial) +
                                 " abandoned after " + std::to_string(kAttempts) + " attempts");
            return c;
        });

    std::vector<double> values;
    for (const TrialCell& c : cells) {
        for (const std::string& w : c.warnings) rep.warnings.push_back(w);
        if (c.ok) {
            rep.rows.push_back(c.row);
            values.push_back(c.row.jaccard);
        }
    }
    if (!values.empty()) {
        std::sort(values.begin(), values.end());
        const std::size_t m = values.size();
        rep.median = m % 2 == 1 ? values[m / 2] : (values[m / 2 - 1] + values[m / 2]) / 2.0;
    }
    rep.summary = summarize(rep.rows);
    return rep;
}

std::string report_csv(const StabilityReport& r) {
    std::string out = "protocol,dataset,generator,parameter,left,right,jaccard\n";
    for (const ComparisonRow& row : r.rows) {
        out += csv_field(row.protocol) + ',' + csv_field(row.dataset) + ',' +
               csv_field(row.generator) + ',' + csv_field(row.parameter) + ',' +
               csv_field(row.left) + ',' + csv_field(row.right) + ',' +
               double_repr(row.jaccard) + '\n';
    }
    return out;
}

std::string summary_csv(const StabilityReport& r) {
    std::string out = "group,protocol,generator,mean,stdev\n";
    for (const SummaryRow& row : r.summary) {
        out += csv_field(row.group) + ',' + csv_field(row.protocol) + ',' +
               csv_field(row.generator) + ',' + two_decimals(row.mean) + ',' +
               two_decimals(row.stdev) + '\n';
    }
    return out;
}

std::string graphs_csv(const StabilityReport& r) {
    std::string out = "id,parameter,edge_count\n";
    for (const GraphStat& g : r.graph_stats) {
        out += csv_field(g.id) + ',' + double_repr(g.parameter) + ',' +
               std::to_string(g.edge_count) + '\n';
    }
    return out;
}

}  // namespace causal
