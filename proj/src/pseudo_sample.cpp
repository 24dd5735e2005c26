#include <algorithm>
#include <cmath>
#include <numeric>

#include "xvine/error.hpp"
#include "xvine/estimation.hpp"

namespace xvine {

std::vector<std::size_t> PseudoSample::rows_all(NodeSet D) const {
    std::vector<std::size_t> out;
    const std::uint64_t m = D.bits();
    for (std::size_t i = 0; i < n; ++i)
        if ((mask[i] & m) == m) out.push_back(i);
    return out;
}

std::vector<std::size_t> PseudoSample::rows_any(NodeSet S) const {
    std::vector<std::size_t> out;
    const std::uint64_t m = S.bits();
    for (std::size_t i = 0; i < n; ++i)
        if (mask[i] & m) out.push_back(i);
    return out;
}

namespace {

void index_exceedances(PseudoSample& ps, double threshold) {
    ps.exceed.assign(ps.d, {});
    ps.mask.assign(ps.n, 0);
    for (std::size_t i = 0; i < ps.n; ++i)
        for (int j = 0; j < ps.d; ++j)
            if (ps.z_hat(i, j) < threshold) {
                ps.exceed[j].push_back(i);
                ps.mask[i] |= std::uint64_t{1} << j;
            }
}

}  // namespace

PseudoSample rank_transform(const Matrix& X, std::size_t k) {
    const std::size_t n = X.rows;
    const int d = static_cast<int>(X.cols);
    if (n < 2) fail(ErrorKind::InsufficientData, "rank transform needs n >= 2");
    if (d < 1 || d > NodeSet::kMaxNode) fail(ErrorKind::DomainError, "dimension out of range");
    if (k < 1 || k >= n) fail(ErrorKind::DomainError, "k must satisfy 1 <= k < n");
    PseudoSample ps;
    ps.n = n;
    ps.d = d;
    ps.k = static_cast<double>(k);
    ps.from_ranks = true;
    ps.u_hat = Matrix(n, d);
    ps.z_hat = Matrix(n, d);
    ps.u_hat.names = ps.z_hat.names = X.names;
    std::vector<double> col(n), sorted(n);
    for (int j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = X(i, j);
            if (!std::isfinite(col[i])) fail(ErrorKind::DomainError, "non-finite value in column " + std::to_string(j + 1));
        }
        sorted = col;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() == sorted.back())
            fail(ErrorKind::DegenerateColumn, "column " + std::to_string(j + 1) + " is constant");
        for (std::size_t i = 0; i < n; ++i) {
            // Maximal rank: number of observations <= X_ij.
            auto rnk = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), col[i]) - sorted.begin());
            double u = 1.0 - (rnk - 0.5) / static_cast<double>(n);
            ps.u_hat(i, j) = u;
            ps.z_hat(i, j) = static_cast<double>(n) / static_cast<double>(k) * u;
        }
    }
    index_exceedances(ps, 1.0);
    return ps;
}

PseudoSample from_inverted_pareto(const Matrix& Z) {
    const int d = static_cast<int>(Z.cols);
    if (d < 1 || d > NodeSet::kMaxNode) fail(ErrorKind::DomainError, "dimension out of range");
    PseudoSample ps;
    ps.n = Z.rows;
    ps.d = d;
    ps.from_ranks = false;
    ps.z_hat = Z;
    for (double v : Z.data)
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::DomainError, "inverted-Pareto data must be positive");
    index_exceedances(ps, 1.0);
    std::size_t total = 0;
    for (const auto& e : ps.exceed) total += e.size();
    ps.k = d ? static_cast<double>(total) / d : 0.0;
    return ps;
}

double empirical_chi(const PseudoSample& ps, std::span<const int> nodes) {
    if (nodes.size() < 2 || nodes.size() > 3) fail(ErrorKind::InvalidIndex, "chi needs two or three nodes");
    NodeSet S;
    double denom = 0.0;
    for (int v : nodes) {
        if (v < 1 || v > ps.d) fail(ErrorKind::InvalidIndex, "node out of range");
        S.insert(v);
        denom += static_cast<double>(ps.exceed[v - 1].size());
    }
    if (S.size() != static_cast<int>(nodes.size())) fail(ErrorKind::InvalidIndex, "chi nodes must be distinct");
    denom = ps.from_ranks ? ps.k : denom / static_cast<double>(nodes.size());
    if (denom <= 0.0) return 0.0;
    return static_cast<double>(ps.rows_all(S).size()) / denom;
}

namespace {

// Number of pairs within runs of equal values in a sorted range.
template <class Eq>
double tied_pairs(std::size_t n, Eq eq) {
    double t = 0.0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && eq(i - 1, i)) {
            ++run;
        } else {
            t += 0.5 * static_cast<double>(run) * static_cast<double>(run - 1);
            run = 1;
        }
    }
    return t;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n) fail(ErrorKind::DomainError, "kendall_tau needs equal lengths");
    if (n < 2) return 0.0;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    double n1 = tied_pairs(n, [&](std::size_t i, std::size_t j) { return x[idx[i]] == x[idx[j]]; });
    double n3 = tied_pairs(n, [&](std::size_t i, std::size_t j) {
        return x[idx[i]] == x[idx[j]] && y[idx[i]] == y[idx[j]];
    });
    // Merge sort on y counting exchanges (discordant pairs).
    std::vector<double> a(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = y[idx[i]];
    double swaps = 0.0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (a[j] < a[i]) {
                    buf[k++] = a[j++];
                    swaps += static_cast<double>(mid - i);
                } else {
                    buf[k++] = a[i++];
                }
            }
            while (i < mid) buf[k++] = a[i++];
            while (j < hi) buf[k++] = a[j++];
        }
        std::swap(a, buf);
    }
    double n2 = tied_pairs(n, [&](std::size_t i, std::size_t j) { return a[i] == a[j]; });
    double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    double den = std::sqrt((n0 - n1) * (n0 - n2));
    if (den == 0.0) return 0.0;
    return (n0 - n1 - n2 + n3 - 2.0 * swaps) / den;
}

}  // namespace xvine
