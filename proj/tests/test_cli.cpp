#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace {

struct CliResult {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("CAUSALKIT_BIN");
    if (!bin) throw std::runtime_error("CAUSALKIT_BIN not set");
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliResult r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    return r;
}

const std::filesystem::path& scratch() {
    static const std::filesystem::path dir = [] {
        const auto d = std::filesystem::temp_directory_path() / "causalkit_cli_scratch";
        std::filesystem::remove_all(d);
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Fixture {
    std::filesystem::path gauss_csv, uni1_csv, uni2_csv, graph_json, graph_rerun_json;
};

// Tables and graphs shared across the cases below, produced by the tool
// itself so every test exercises the real binary.
const Fixture& fx() {
    static const Fixture f = [] {
        const auto dir = scratch();
        const auto must = [](const std::string& args) {
            const CliResult r = run_cli(args);
            if (r.code != 0)
                throw std::runtime_error("fixture command failed: " + args + "\n" + r.out);
        };
        Fixture f;
        f.gauss_csv = dir / "gauss.csv";
        f.uni1_csv = dir / "uni1.csv";
        f.uni2_csv = dir / "uni2.csv";
        f.graph_json = dir / "g1.json";
        f.graph_rerun_json = dir / "g2.json";
        must("synth --nodes 4 --edge-prob 0.5 --samples 300 --seed 11 --out " +
             (dir / "gauss").string());
        must("synth --nodes 4 --edge-prob 0.5 --samples 300 --noise uniform --seed 5 --out " +
             (dir / "uni1").string());
        must("synth --nodes 4 --edge-prob 0.5 --samples 300 --noise uniform --seed 6 --out " +
             (dir / "uni2").string());
        must("discover --algo pc --input " + f.gauss_csv.string() + " --out " +
             f.graph_json.string());
        must("discover --algo pc --input " + f.gauss_csv.string() + " --out " +
             f.graph_rerun_json.string());
        return f;
    }();
    return f;
}

}  // namespace

TEST_CASE("--version prints the tool banner") {
    const CliResult r = run_cli("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("causalkit 0.1.0 (graph format 1, report format 1)") != std::string::npos);
}

TEST_CASE("synth writes a table and its model") {
    const auto base = (scratch() / "fresh").string();
    const CliResult r = run_cli("synth --nodes 3 --samples 120 --seed 2 --out " + base);
    CHECK(r.code == 0);
    CHECK(r.out.find("wrote") != std::string::npos);
    CHECK(std::filesystem::exists(base + ".csv"));
    CHECK(std::filesystem::exists(base + ".sem.json"));
}

TEST_CASE("synth validates its arguments") {
    const auto base = (scratch() / "reject").string();
    CHECK(run_cli("synth --nodes 1 --out " + base).code == 2);
    CHECK(run_cli("synth --nodes 3 --samples 5 --out " + base).code == 2);
    CHECK(run_cli("synth --nodes 3 --edge-prob 1.5 --out " + base).code == 2);
}

TEST_CASE("discover reports the fitted graph and reruns byte-identically") {
    const Fixture& f = fx();
    const CliResult r = run_cli("discover --algo pc --input " + f.gauss_csv.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("nodes 4") != std::string::npos);
    CHECK(r.out.find("edges ") != std::string::npos);
    CHECK(slurp(f.graph_json) == slurp(f.graph_rerun_json));

    const auto dot = (scratch() / "g.dot").string();
    CHECK(run_cli("discover --algo pc --input " + f.gauss_csv.string() + " --out " + dot +
                  " --format dot")
              .code == 0);
    CHECK(slurp(dot).rfind("digraph g {", 0) == 0);
}

TEST_CASE("compare reports full agreement for identical graphs") {
    const Fixture& f = fx();
    const CliResult r =
        run_cli("compare " + f.graph_json.string() + " " + f.graph_rerun_json.string());
    CHECK(r.code == 0);
    CHECK(r.out == "1.0000\n");
}

TEST_CASE("flag misuse exits with code 2") {
    const Fixture& f = fx();
    const std::string csv = f.gauss_csv.string();
    CHECK(run_cli("discover --algo ges --input " + csv + " --alpha 0.05").code == 2);
    CHECK(run_cli("discover --algo lingam --input " + csv + " --alpha 0.05").code == 2);
    CHECK(run_cli("discover --algo pc --input " + csv + " --seed 7").code == 2);
    CHECK(run_cli("discover --algo tabu --input " + csv).code == 2);
    CHECK(run_cli("discover --input " + csv).code == 2);
    CHECK(run_cli("audit --protocol releases --inputs " + csv).code == 2);
    CHECK(run_cli("audit --protocol alpha-sweep --algo ges --inputs " + csv).code == 2);
    CHECK(run_cli("audit --protocol subsample --inputs " + csv + " --jobs 0").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("unreadable or malformed inputs exit with code 3") {
    const Fixture& f = fx();
    const auto absent = (scratch() / "absent.csv").string();
    CHECK(run_cli("discover --algo pc --input " + absent).code == 3);
    CHECK(run_cli("compare " + f.graph_json.string() + " " + absent).code == 3);

    const auto bad = scratch() / "bad.json";
    std::ofstream(bad) << "not a graph";
    CHECK(run_cli("compare " + bad.string() + " " + bad.string()).code == 3);

    const auto tiny = scratch() / "tiny.csv";
    std::ofstream(tiny) << "a,b\n1,2\n3,4\n";
    CHECK(run_cli("discover --algo pc --input " + tiny.string()).code == 3);
}

TEST_CASE("unmixing failure exits with code 4") {
    // 20 rows of 6 independent Gaussian columns: too little non-Gaussian
    // signal for the contrast iteration to settle.
    const auto base = (scratch() / "nonconv").string();
    CHECK(run_cli("synth --nodes 6 --edge-prob 0.0 --samples 20 --seed 3 --out " + base).code ==
          0);
    const CliResult r = run_cli("discover --algo lingam --input " + base + ".csv");
    CHECK(r.code == 4);
    CHECK(r.out.find("did not converge") != std::string::npos);
}

TEST_CASE("audit reruns are byte-identical and threads do not change the report") {
    const Fixture& f = fx();
    const auto d1 = (scratch() / "aud1").string();
    const auto d2 = (scratch() / "aud2").string();
    const auto d3 = (scratch() / "aud3").string();
    const std::string base =
        "audit --protocol subsample --inputs " + f.gauss_csv.string() + " --seed 9 --out ";

    const CliResult r1 = run_cli(base + d1);
    CHECK(r1.code == 0);
    CHECK(r1.out.find("rows 19 of 19") != std::string::npos);
    CHECK(run_cli(base + d2).code == 0);
    CHECK(run_cli(base + d3 + " --jobs 4").code == 0);

    const std::string rep = slurp(std::filesystem::path(d1) / "report.csv");
    CHECK(rep == slurp(std::filesystem::path(d2) / "report.csv"));
    CHECK(rep == slurp(std::filesystem::path(d3) / "report.csv"));
    CHECK(rep.rfind("protocol,dataset,generator,parameter,left,right,jaccard\n", 0) == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(d1) / "summary.csv"));
}

TEST_CASE("audit releases compares consecutive tables") {
    const Fixture& f = fx();
    const CliResult r = run_cli("audit --protocol releases --inputs " + f.uni1_csv.string() +
                                " " + f.uni2_csv.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("rows 1 of 1") != std::string::npos);
}

TEST_CASE("audit alpha-sweep records per-graph edge counts") {
    const Fixture& f = fx();
    const auto dir = (scratch() / "sweep").string();
    const CliResult r =
        run_cli("audit --protocol alpha-sweep --inputs " + f.gauss_csv.string() + " --out " + dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("rows 998 of 998") != std::string::npos);
    const std::string graphs = slurp(std::filesystem::path(dir) / "graphs.csv");
    CHECK(graphs.rfind("id,parameter,edge_count\n", 0) == 0);
    CHECK(std::count(graphs.begin(), graphs.end(), '\n') == 1000);
}

TEST_CASE("audit cross-generator reports a median") {
    const Fixture& f = fx();
    const CliResult r = run_cli("audit --protocol cross-generator --inputs " +
                                f.uni1_csv.string() + " " + f.uni2_csv.string() + " --seed 4");
    CHECK(r.code == 0);
    CHECK(r.out.find("median ") != std::string::npos);
}

TEST_CASE("rank consumes an audit report") {
    const Fixture& f = fx();
    const auto dir = (scratch() / "forrank").string();
    CHECK(run_cli("audit --protocol subsample --inputs " + f.gauss_csv.string() + " --out " + dir)
              .code == 0);
    const std::string report = (std::filesystem::path(dir) / "report.csv").string();

    const CliResult r = run_cli("rank --input " + report);
    CHECK(r.code == 0);
    CHECK(r.out.rfind("rank,group,mean,stdev\n", 0) == 0);
    CHECK(r.out.find("0,pc,") != std::string::npos);

    const CliResult multi = run_cli("rank --input " + report + " --by protocol --by generator");
    CHECK(multi.code == 0);
    CHECK(multi.out.find("subsample|pc") != std::string::npos);

    CHECK(run_cli("rank --input " + report + " --by flavor").code == 3);
}
