#include "causal/citest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace causal {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs p in (0, 1)");
    auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };

    // Tail-shaped starting point, then safeguarded Newton.
    double x = p >= 0.5 ? std::sqrt(std::max(0.0, -2.0 * std::log(1.0 - p)))
                        : -std::sqrt(std::max(0.0, -2.0 * std::log(p)));
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 100; ++it) {
        const double err = cdf(x) - p;
        if (err > 0) hi = std::min(hi, x);
        else lo = std::max(lo, x);
        const double d = pdf(x);
        double next = d > 0 ? x - err / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

namespace {

// In-place Cholesky on a small buffer; returns false when a pivot collapses,
// i.e. the matrix is not numerically positive definite.
bool cholesky(double* m, int n) {
    for (int j = 0; j < n; ++j) {
        double d = m[j * n + j];
        for (int k = 0; k < j; ++k) d -= m[j * n + k] * m[j * n + k];
        if (!(d > 1e-13)) return false;
        const double root = std::sqrt(d);
        m[j * n + j] = root;
        for (int i = j + 1; i < n; ++i) {
            double v = m[i * n + j];
            for (int k = 0; k < j; ++k) v -= m[i * n + k] * m[j * n + k];
            m[i * n + j] = v / root;
        }
    }
    return true;
}

// Solves L L^T x = e_col for the first two entries of x.
void solve_unit(const double* l, int n, int col, double* x) {
    for (int i = 0; i < n; ++i) {
        double v = i == col ? 1.0 : 0.0;
        for (int k = 0; k < i; ++k) v -= l[i * n + k] * x[k];
        x[i] = v / l[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double v = x[i];
        for (int k = i + 1; k < n; ++k) v -= l[k * n + i] * x[k];
        x[i] = v / l[i * n + i];
    }
}

constexpr int kStackDim = 16;

double partial_corr_impl(const SufficientStats& s, int i, int j, std::span<const int> cond) {
    const int p = static_cast<int>(s.corr.rows());
    if (i == j) throw std::invalid_argument("partial correlation needs distinct variables");
    auto check = [p](int v) {
        if (v < 0 || v >= p) throw std::invalid_argument("variable index out of range");
    };
    check(i);
    check(j);
    for (int c : cond) {
        check(c);
        if (c == i || c == j)
            throw std::invalid_argument("conditioning set must exclude the tested pair");
    }

    std::vector<int> vars;
    vars.reserve(cond.size() + 2);
    vars.push_back(std::min(i, j));
    vars.push_back(std::max(i, j));
    vars.insert(vars.end(), cond.begin(), cond.end());
    std::sort(vars.begin() + 2, vars.end());
    const int m = static_cast<int>(vars.size());

    double p00, p01, p11;
    double stack[kStackDim * kStackDim];
    bool ok = false;
    if (m <= kStackDim) {
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) stack[r * m + c] = s.corr(vars[r], vars[c]);
        if (cholesky(stack, m)) {
            double x0[kStackDim], x1[kStackDim];
            solve_unit(stack, m, 0, x0);
            solve_unit(stack, m, 1, x1);
            p00 = x0[0];
            p01 = x0[1];
            p11 = x1[1];
            ok = true;
        }
    }
    if (!ok) {
        Eigen::MatrixXd sub(m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) sub(r, c) = s.corr(vars[r], vars[c]);
        Eigen::LLT<Eigen::MatrixXd> llt(sub);
        if (m <= kStackDim || llt.info() != Eigen::Success) {
            // Singular submatrix: fall back to the pseudo-inverse.
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
            Eigen::MatrixXd pinv = cod.pseudoInverse();
            p00 = pinv(0, 0);
            p01 = pinv(0, 1);
            p11 = pinv(1, 1);
        } else {
            Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
            p00 = inv(0, 0);
            p01 = inv(0, 1);
            p11 = inv(1, 1);
        }
    }

    const double denom = std::sqrt(p00 * p11);
    if (!(denom > 0.0) || !std::isfinite(denom)) return 0.0;
    return std::clamp(-p01 / denom, -1.0, 1.0);
}

std::uint64_t cache_key(int i, int j, std::span<const int> cond) {
    const int a = std::min(i, j), b = std::max(i, j);
    std::uint64_t mask = 0;
    for (int c : cond) mask |= std::uint64_t{1} << c;
    return (static_cast<std::uint64_t>(a * 64 + b) << 40) | mask;
}

}  // namespace

double partial_correlation(const SufficientStats& s, int i, int j, std::span<const int> cond) {
    return partial_corr_impl(s, i, j, cond);
}

static CITResult test_impl(const SufficientStats& s, std::span<const int> cond, double alpha,
                           double rho) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    const long df = s.n - static_cast<long>(cond.size()) - 3;
    if (df < 1)
        throw DataError("sample too small for conditioning set of size " +
                        std::to_string(cond.size()));

    CITResult r;
    r.conditioning_size = static_cast<int>(cond.size());
    if (std::abs(rho) >= 1.0 - 1e-12) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.independent = false;
        return r;
    }
    r.statistic = std::sqrt(static_cast<double>(df)) * std::abs(std::atanh(rho));
    r.independent = r.statistic <= normal_quantile(1.0 - alpha / 2.0);
    return r;
}

CITResult independent(const SufficientStats& s, int i, int j, std::span<const int> cond,
                      double alpha) {
    return test_impl(s, cond, alpha, partial_corr_impl(s, i, j, cond));
}

CiEngine::CiEngine(const SufficientStats& s, bool memoize) : stats_(&s), memoize_(memoize) {}

double CiEngine::partial_corr(int i, int j, std::span<const int> cond) const {
    if (!memoize_ || size() > 40) return partial_corr_impl(*stats_, i, j, cond);
    const std::uint64_t key = cache_key(i, j, cond);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double rho = partial_corr_impl(*stats_, i, j, cond);
    cache_.emplace(key, rho);
    return rho;
}

CITResult CiEngine::test(int i, int j, std::span<const int> cond, double alpha) const {
    return test_impl(*stats_, cond, alpha, partial_corr(i, j, cond));
}

}  // namespace causal
