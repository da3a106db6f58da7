#include "causal/lingam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "causal/errors.hpp"
#include "causal/rng.hpp"

namespace causal {

namespace {

// (M M^T)^{-1/2} M with eigenvalues floored away from zero.
Eigen::MatrixXd symmetric_decorrelate(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m * m.transpose());
    Eigen::VectorXd inv_sqrt = es.eigenvalues();
    for (int i = 0; i < inv_sqrt.size(); ++i)
        inv_sqrt(i) = 1.0 / std::sqrt(std::max(inv_sqrt(i), 1e-12));
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * m;
}

}  // namespace

Eigen::MatrixXd fastica(const Eigen::MatrixXd& x, std::uint64_t seed, const FastIcaOptions& opt) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());

    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd scale = es.eigenvalues();
    for (int i = 0; i < p; ++i) scale(i) = 1.0 / std::sqrt(std::max(scale(i), 1e-12));
    const Eigen::MatrixXd whiten = scale.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd z = x * whiten.transpose();

    for (int attempt = 0; attempt < opt.restarts; ++attempt) {
        rng::Xoshiro256 gen(rng::derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        Eigen::MatrixXd w(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) w(i, j) = rng::normal(gen);
        w = symmetric_decorrelate(w);

        for (int iter = 0; iter < opt.max_iter; ++iter) {
            const Eigen::MatrixXd u = z * w.transpose();          // n x p projections
            const Eigen::MatrixXd g = u.array().tanh().matrix();  // contrast
            const Eigen::VectorXd g_deriv =
                (1.0 - g.array().square()).colwise().mean().matrix().transpose();
            Eigen::MatrixXd w1 =
                (g.transpose() * z) / static_cast<double>(n) - g_deriv.asDiagonal() * w;
            w1 = symmetric_decorrelate(w1);

            double worst = 1.0;
            for (int i = 0; i < p; ++i)
                worst = std::min(worst, std::abs(w1.row(i).dot(w.row(i))));
            w = std::move(w1);
            if (worst > 1.0 - opt.tol) return w * whiten;
        }
    }
    throw FastIcaError("fastica did not converge after " + std::to_string(opt.restarts) +
                       " restarts");
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<std::uint8_t> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> out(n);
    for (int j = 1; j <= n; ++j) out[match[j] - 1] = j - 1;
    return out;
}

LingamResult ica_lingam(const Table& t, std::uint64_t seed, double prune) {
    const int n = static_cast<int>(t.rows());
    const int p = static_cast<int>(t.cols());
    LingamResult res;
    if (p == 1) {
        res.order = {0};
        res.b = Eigen::MatrixXd::Zero(1, 1);
        res.graph = MixedGraph(t.column_names());
        return res;
    }

    Eigen::MatrixXd x = t.values;
    const Eigen::VectorXd mean = x.colwise().mean();
    x.rowwise() -= mean.transpose();
    Eigen::VectorXd sd(p);
    for (int j = 0; j < p; ++j) {
        sd(j) = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n - 1));
        if (!(sd(j) > 0.0))
            throw DataError("constant column in model input: " + t.column_names()[j]);
        x.col(j) /= sd(j);
    }

    const Eigen::MatrixXd w = fastica(x, seed);

    Eigen::MatrixXd cost(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) cost(i, j) = 1.0 / std::max(std::abs(w(i, j)), 1e-12);
    const std::vector<int> row_to_col = min_cost_assignment(cost);
    Eigen::MatrixXd wp(p, p);
    for (int r = 0; r < p; ++r) wp.row(row_to_col[r]) = w.row(r);
    for (int i = 0; i < p; ++i) wp.row(i) /= wp(i, i);
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(p, p) - wp;

    // Most exogenous first: smallest total dependence on the rest.
    std::vector<int> remaining(p);
    std::iota(remaining.begin(), remaining.end(), 0);
    res.order.reserve(p);
    while (!remaining.empty()) {
        int best = -1;
        double best_sum = std::numeric_limits<double>::infinity();
        for (int i : remaining) {
            double sum = 0.0;
            for (int j : remaining)
                if (j != i) sum += std::abs(b(i, j));
            if (sum < best_sum) {
                best_sum = sum;
                best = i;
            }
        }
        res.order.push_back(best);
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    }

    std::vector<int> pos(p);
    for (int k = 0; k < p; ++k) pos[res.order[k]] = k;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (pos[i] <= pos[j]) b(i, j) = 0.0;        // the order forbids this entry
            if (std::abs(b(i, j)) < prune) b(i, j) = 0.0;
        }

    res.b = b;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) res.b(i, j) *= sd(i) / sd(j);

    const auto& names = t.column_names();
    MixedGraph gr(names);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (res.b(i, j) != 0.0)
                gr.set_edge(names[j], names[i], Mark::Tail, Mark::Arrow, res.b(i, j));
    res.graph = std::move(gr);
    return res;
}

}  // namespace causal
