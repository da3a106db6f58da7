#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "causal/errors.hpp"
#include "causal/lingam.hpp"
#include "causal/rng.hpp"
#include "causal/sem.hpp"
#include "oracles.hpp"

using namespace causal;

namespace {

Table uniform_pair(double weight, long n, std::uint64_t seed) {
    SemSpec spec;
    spec.nodes = {"x", "y"};
    spec.edges = {{"x", "y", weight}};
    spec.noise = NoiseKind::Uniform;
    return synth_sem(spec, n, seed);
}

double brute_min_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> cols(n);
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int r = 0; r < n; ++r) total += cost(r, cols[r]);
        best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

}  // namespace

TEST_CASE("assignment on hand matrices") {
    Eigen::MatrixXd keep(2, 2);
    keep << 1, 2, 2, 1;
    CHECK(min_cost_assignment(keep) == std::vector<int>{0, 1});

    Eigen::MatrixXd swap(2, 2);
    swap << 2, 1, 1, 2;
    CHECK(min_cost_assignment(swap) == std::vector<int>{1, 0});

    Eigen::MatrixXd three(3, 3);
    three << 4, 1, 3,
             2, 0, 5,
             3, 2, 2;
    CHECK(min_cost_assignment(three) == std::vector<int>{1, 0, 2});
}

TEST_CASE("assignment matches exhaustive search") {
    rng::Xoshiro256 g(8811);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng::bounded(g, 5));
        Eigen::MatrixXd cost(n, n);
        const bool coarse = trial % 2 == 0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double v = rng::uniform(g, 0.0, 10.0);
                if (coarse) v = std::floor(v * 2.0) / 2.0;  // provoke ties
                cost(r, c) = v;
            }
        const std::vector<int> pick = min_cost_assignment(cost);
        std::vector<int> sorted = pick;
        std::sort(sorted.begin(), sorted.end());
        for (int c = 0; c < n; ++c) CHECK(sorted[c] == c);
        double total = 0.0;
        for (int r = 0; r < n; ++r) total += cost(r, pick[r]);
        CHECK(total == doctest::Approx(brute_min_assignment(cost)).epsilon(1e-9));
    }
}

TEST_CASE("unmixing recovers a known mixing up to scaled permutation") {
    const long n = 4000;
    rng::Xoshiro256 g(515);
    Eigen::MatrixXd s(n, 2);
    const double half = std::sqrt(3.0);
    for (long r = 0; r < n; ++r) {
        s(r, 0) = rng::uniform(g, -half, half);
        s(r, 1) = rng::uniform(g, -half, half);
    }
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 0.5,
         0.2, 1.0;
    Eigen::MatrixXd x = s * a.transpose();

    x.rowwise() -= x.colwise().mean();
    Eigen::MatrixXd m = a;
    for (int i = 0; i < 2; ++i) {
        const double sd = std::sqrt(x.col(i).squaredNorm() / static_cast<double>(n - 1));
        x.col(i) /= sd;
        m.row(i) /= sd;
    }
    const Eigen::MatrixXd w = fastica(x, 7);
    CHECK(oracle::amari_distance(w, m) < 0.05);
}

TEST_CASE("non-convergence raises after the configured restarts") {
    rng::Xoshiro256 g(16);
    Eigen::MatrixXd x(400, 2);
    for (long r = 0; r < 400; ++r) {
        x(r, 0) = rng::uniform(g, -1.0, 1.0);
        x(r, 1) = rng::uniform(g, -1.0, 1.0);
    }
    const FastIcaOptions strict{1, 1e-12, 1};
    CHECK_THROWS_AS(fastica(x, 3, strict), FastIcaError);
}

TEST_CASE("a two-variable fit recovers direction and coefficient") {
    const Table t = uniform_pair(0.8, 5000, 321);
    const LingamResult r = ica_lingam(t, 9);
    CHECK(r.order == std::vector<int>{0, 1});
    CHECK(r.b(1, 0) > 0.75);
    CHECK(r.b(1, 0) < 0.85);
    CHECK(r.b(0, 1) == 0.0);
    REQUIRE(r.graph.edge_count() == 1);
    CHECK(r.graph.mark_at("y", "x") == Mark::Arrow);
    const auto e = r.graph.edge("x", "y");
    REQUIRE(e.has_value());
    CHECK(*e->weight == r.b(1, 0));
}

TEST_CASE("a three-variable chain orders correctly and drops the absent edge") {
    SemSpec spec;
    spec.nodes = {"x", "y", "z"};
    spec.edges = {{"x", "y", 0.8}, {"y", "z", 0.8}};
    spec.noise = NoiseKind::Uniform;
    const Table t = synth_sem(spec, 8000, 500);
    const LingamResult r = ica_lingam(t, 11);
    CHECK(r.order == std::vector<int>{0, 1, 2});
    CHECK(r.b(1, 0) == doctest::Approx(0.8).epsilon(0.07));
    CHECK(r.b(2, 1) == doctest::Approx(0.8).epsilon(0.07));
    CHECK(r.b(2, 0) == 0.0);
    CHECK(r.graph.edge_count() == 2);
}

TEST_CASE("the prune threshold gates weak standardized coefficients") {
    const Table t = uniform_pair(0.2, 6000, 77);
    const LingamResult keep = ica_lingam(t, 13);
    CHECK(keep.b(1, 0) == doctest::Approx(0.2).epsilon(0.2));
    CHECK(keep.graph.edge_count() == 1);

    const LingamResult cut = ica_lingam(t, 13, 0.3);
    CHECK(cut.b(1, 0) == 0.0);
    CHECK(cut.graph.edge_count() == 0);
}

TEST_CASE("coefficients report on the raw scale") {
    const Table t = uniform_pair(0.8, 5000, 321);
    Table scaled = t;
    scaled.values.col(0) *= 10.0;
    const LingamResult plain = ica_lingam(t, 9);
    const LingamResult tenfold = ica_lingam(scaled, 9);
    CHECK(tenfold.b(1, 0) == doctest::Approx(plain.b(1, 0) / 10.0).epsilon(1e-3));
}

TEST_CASE("single column and constant column edge cases") {
    Table solo;
    solo.name = "solo";
    solo.columns = {Column{"a"}};
    solo.values.resize(15, 1);
    for (int i = 0; i < 15; ++i) solo.values(i, 0) = i * i % 7;
    const LingamResult r = ica_lingam(solo, 1);
    CHECK(r.order == std::vector<int>{0});
    CHECK(r.b(0, 0) == 0.0);
    CHECK(r.graph.edge_count() == 0);

    Table flat;
    flat.name = "flat";
    flat.columns = {Column{"a"}, Column{"b"}};
    flat.values.resize(20, 2);
    for (int i = 0; i < 20; ++i) {
        flat.values(i, 0) = i;
        flat.values(i, 1) = 3.0;
    }
    CHECK_THROWS_AS(ica_lingam(flat, 1), DataError);
}

TEST_CASE("the fit is deterministic") {
    const Table t = uniform_pair(0.8, 3000, 99);
    const LingamResult a = ica_lingam(t, 5);
    const LingamResult b = ica_lingam(t, 5);
    CHECK(a.order == b.order);
    CHECK(a.b == b.b);
    CHECK(serialize(a.graph) == serialize(b.graph));
}
