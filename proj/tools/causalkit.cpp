#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causal/dataset.hpp"
#include "causal/errors.hpp"
#include "causal/graph.hpp"
#include "causal/ranking.hpp"
#include "causal/rng.hpp"
#include "causal/sem.hpp"
#include "causal/stability.hpp"

namespace {

using namespace causal;

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    out << text;
}

std::unique_ptr<Generator> make_generator(const std::string& algo, double alpha) {
    if (algo == "pc") return std::make_unique<PcGenerator>(alpha);
    if (algo == "fci") return std::make_unique<FciGenerator>(alpha);
    if (algo == "ges") return std::make_unique<GesGenerator>();
    return std::make_unique<LingamGenerator>();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

struct DiscoverArgs {
    std::string algo, input, out, format = "json";
    double alpha = 0.01;
    std::uint64_t seed = 0;
    std::vector<std::string> dependent;
    bool alpha_given = false, seed_given = false;
};

int run_discover(const DiscoverArgs& a) {
    if (a.alpha_given && a.algo != "pc" && a.algo != "fci") {
        std::cerr << "error: --alpha applies only to pc and fci\n";
        return 2;
    }
    if (a.seed_given && a.algo != "lingam") {
        std::cerr << "error: --seed applies only to lingam\n";
        return 2;
    }
    const Table t =
        load_table(a.input, std::set<std::string>(a.dependent.begin(), a.dependent.end()));
    for (const std::string& w : t.cleaning.warnings) std::cerr << "warning: " << w << "\n";
    const MixedGraph g = make_generator(a.algo, a.alpha)->run(t, a.seed);
    if (!a.out.empty()) write_file(a.out, a.format == "dot" ? to_dot(g) : serialize(g));
    std::cout << "nodes " << g.nodes().size() << "\n"
              << "edges " << g.edge_count() << "\n";
    return 0;
}

int run_compare(const std::string& left, const std::string& right) {
    const MixedGraph gl = deserialize(read_file(left));
    const MixedGraph gr = deserialize(read_file(right));
    std::printf("%.4f\n", jaccard(canonical_tokens(gl), canonical_tokens(gr)));
    return 0;
}

struct AuditArgs {
    std::string protocol, algo = "pc", out;
    std::vector<std::string> inputs;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool algo_given = false;
};

int run_audit(const AuditArgs& a) {
    if (a.inputs.empty()) {
        std::cerr << "error: no inputs\n";
        return 2;
    }
    if ((a.protocol == "releases" || a.protocol == "projects") && a.inputs.size() < 2) {
        std::cerr << "error: " << a.protocol << " needs at least two inputs\n";
        return 2;
    }
    const bool uses_algo =
        a.protocol == "releases" || a.protocol == "projects" || a.protocol == "subsample";
    if (a.algo_given && !uses_algo) {
        std::cerr << "error: --algo does not apply to " << a.protocol << "\n";
        return 2;
    }
    if (a.jobs < 1) {
        std::cerr << "error: --jobs must be positive\n";
        return 2;
    }

    std::vector<Table> tables;
    tables.reserve(a.inputs.size());
    for (const std::string& path : a.inputs) {
        tables.push_back(load_table(path));
        for (const std::string& w : tables.back().cleaning.warnings)
            std::cerr << "warning: " << tables.back().name << ": " << w << "\n";
    }

    AuditOptions opt;
    opt.seed = a.seed;
    opt.jobs = a.jobs;

    StabilityReport rep;
    if (a.protocol == "releases") {
        rep = run_releases(*make_generator(a.algo, 0.01), tables, opt);
    } else if (a.protocol == "projects") {
        rep = run_projects(*make_generator(a.algo, 0.01), tables, opt);
    } else if (a.protocol == "alpha-sweep") {
        rep = run_alpha_sweep(tables, opt);
    } else if (a.protocol == "subsample") {
        rep = run_subsample(*make_generator(a.algo, 0.01), tables, opt);
    } else {
        rep = run_cross_generator(tables, opt);
    }

    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        const std::filesystem::path dir(a.out);
        write_file(dir / "report.csv", report_csv(rep));
        write_file(dir / "summary.csv", summary_csv(rep));
        if (!rep.graph_stats.empty()) write_file(dir / "graphs.csv", graphs_csv(rep));
    }
    std::cout << summary_csv(rep);
    std::cout << "rows " << rep.rows.size() << " of " << rep.planned << "\n";
    if (rep.median) std::printf("median %.4f\n", *rep.median);
    if (rep.rows.size() * 10 < rep.planned * 9) {
        std::cerr << "error: completed " << rep.rows.size() << " of " << rep.planned
                  << " comparisons\n";
        return 1;
    }
    return 0;
}

struct RankArgs {
    std::string input, out;
    std::vector<std::string> by = {"generator"};
    std::uint64_t seed = 0;
};

int run_rank(const RankArgs& a) {
    const std::string text = read_file(a.input);
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
    if (lines.empty()) throw DataError(a.input + ": empty report");

    const std::vector<std::string> header = split_csv(lines[0]);
    std::vector<std::size_t> by_idx;
    for (const std::string& col : a.by) {
        const auto it = std::find(header.begin(), header.end(), col);
        if (it == header.end()) throw DataError(a.input + ": no column named " + col);
        by_idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    const auto jit = std::find(header.begin(), header.end(), "jaccard");
    if (jit == header.end()) throw DataError(a.input + ": no jaccard column");
    const auto val_idx = static_cast<std::size_t>(jit - header.begin());

    std::map<std::string, std::vector<double>> grouped;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::vector<std::string> fields = split_csv(lines[li]);
        if (fields.size() != header.size())
            throw DataError(a.input + ": row " + std::to_string(li) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        std::string label;
        for (std::size_t k = 0; k < by_idx.size(); ++k) {
            if (k) label += '|';
            label += fields[by_idx[k]];
        }
        const std::string& cell = fields[val_idx];
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
            throw DataError(a.input + ": row " + std::to_string(li) + ": bad jaccard value '" +
                            cell + "'");
        grouped[label].push_back(v);
    }

    std::vector<Group> groups;
    groups.reserve(grouped.size());
    for (auto& [label, values] : grouped) groups.push_back({label, std::move(values)});
    ScottKnottOptions opt;
    opt.seed = a.seed;
    const std::string csv = ranks_csv(scott_knott(std::move(groups), opt));
    if (!a.out.empty()) write_file(a.out, csv);
    std::cout << csv;
    return 0;
}

struct SynthArgs {
    int nodes = 0;
    double edge_prob = 0.3;
    long samples = 1000;
    std::string noise = "gaussian", out;
    std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
    if (a.nodes < 2) {
        std::cerr << "error: --nodes must be at least 2\n";
        return 2;
    }
    if (a.edge_prob < 0.0 || a.edge_prob > 1.0) {
        std::cerr << "error: --edge-prob must lie in [0, 1]\n";
        return 2;
    }
    if (a.samples < 10) {
        std::cerr << "error: --samples must be at least 10\n";
        return 2;
    }
    const NoiseKind nk = a.noise == "uniform" ? NoiseKind::Uniform : NoiseKind::Gaussian;
    const SemSpec spec = random_dag_spec(a.nodes, a.edge_prob, rng::derive_seed(a.seed, 0), nk);
    const Table t = synth_sem(spec, a.samples, rng::derive_seed(a.seed, 1));
    write_file(a.out + ".csv", table_to_csv(t));
    write_file(a.out + ".sem.json", sem_to_json(spec, a.seed));
    std::cout << "wrote " << a.out << ".csv (" << t.rows() << " rows, " << t.cols()
              << " cols)\n"
              << "wrote " << a.out << ".sem.json (" << spec.edges.size() << " edges)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal structure discovery and stability auditing"};
    app.set_version_flag("--version", "causalkit 0.1.0 (graph format 1, report format 1)");
    app.require_subcommand(1);

    DiscoverArgs d;
    CLI::App* discover = app.add_subcommand("discover", "fit one causal graph to a table");
    discover->add_option("--algo", d.algo, "algorithm")
        ->required()
        ->check(CLI::IsMember({"pc", "fci", "ges", "lingam"}));
    discover->add_option("--input", d.input, "CSV table")->required();
    CLI::Option* alpha_opt = discover->add_option("--alpha", d.alpha, "test level (pc, fci)");
    CLI::Option* seed_opt = discover->add_option("--seed", d.seed, "seed (lingam)");
    discover->add_option("--dependent", d.dependent, "columns tagged as outcomes");
    discover->add_option("--out", d.out, "write the graph to this file");
    discover->add_option("--format", d.format, "output format")
        ->check(CLI::IsMember({"json", "dot"}));

    std::string cmp_left, cmp_right;
    CLI::App* compare = app.add_subcommand("compare", "agreement between two graph files");
    compare->add_option("left", cmp_left, "graph JSON")->required();
    compare->add_option("right", cmp_right, "graph JSON")->required();

    AuditArgs au;
    CLI::App* audit = app.add_subcommand("audit", "run a stability protocol over tables");
    audit->add_option("--protocol", au.protocol, "protocol")
        ->required()
        ->check(CLI::IsMember(
            {"releases", "projects", "alpha-sweep", "subsample", "cross-generator"}));
    CLI::Option* algo_opt = audit->add_option("--algo", au.algo, "generator for table protocols")
                                ->check(CLI::IsMember({"pc", "fci", "ges", "lingam"}));
    audit->add_option("--inputs", au.inputs, "CSV tables")->required()->expected(-1);
    audit->add_option("--seed", au.seed, "root seed");
    audit->add_option("--jobs", au.jobs, "worker threads");
    audit->add_option("--out", au.out, "directory for report.csv and summary.csv");

    RankArgs r;
    CLI::App* rank = app.add_subcommand("rank", "rank report groups by agreement");
    rank->add_option("--input", r.input, "report.csv from audit")->required();
    rank->add_option("--by", r.by, "grouping columns");
    rank->add_option("--seed", r.seed, "bootstrap seed");
    rank->add_option("--out", r.out, "write ranks.csv here");

    SynthArgs s;
    CLI::App* synth = app.add_subcommand("synth", "sample a table from a random linear model");
    synth->add_option("--nodes", s.nodes, "variable count")->required();
    synth->add_option("--edge-prob", s.edge_prob, "edge probability");
    synth->add_option("--samples", s.samples, "row count");
    synth->add_option("--noise", s.noise, "noise family")
        ->check(CLI::IsMember({"gaussian", "uniform"}));
    synth->add_option("--seed", s.seed, "root seed");
    synth->add_option("--out", s.out, "output base path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (discover->parsed()) {
            d.alpha_given = alpha_opt->count() > 0;
            d.seed_given = seed_opt->count() > 0;
            return run_discover(d);
        }
        if (compare->parsed()) return run_compare(cmp_left, cmp_right);
        if (audit->parsed()) {
            au.algo_given = algo_opt->count() > 0;
            return run_audit(au);
        }
        if (rank->parsed()) return run_rank(r);
        if (synth->parsed()) return run_synth(s);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const GeneratorError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
