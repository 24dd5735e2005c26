#include <cmath>
#include <vector>

#include "xvine/error.hpp"
#include "xvine/model.hpp"
#include "xvine/numerics.hpp"

namespace xvine {

QuadratureOracle::QuadratureOracle(Density r, int d, double tol) : r_(std::move(r)), d_(d), tol_(tol) {
    if (d < 2 || d > 4) fail(ErrorKind::DimensionTooLarge, "quadrature oracle supports 2 <= d <= 4");
}

double QuadratureOracle::marginal(NodeSet S, std::span<const double> x) const {
    if (S.size() == 1) return 1.0;
    std::vector<int> free = (NodeSet::range(d_) - S).to_vector();
    std::vector<double> pt(x.begin(), x.end());
    std::function<double(std::size_t)> rec = [&](std::size_t depth) -> double {
        if (depth == free.size()) return r_(pt);
        int j = free[depth] - 1;
        return integrate(
            [&, j, depth](double t) {
                pt[j] = t;
                return rec(depth + 1);
            },
            0.0, kQuadUpper, tol_);
    };
    return rec(0);
}

double QuadratureOracle::conditional_density(int i, NodeSet J, std::span<const double> x) const {
    NodeSet A = J;
    A.insert(i);
    return marginal(A, x) / marginal(J, x);
}

double QuadratureOracle::conditional_cdf(int i, NodeSet J, std::span<const double> x) const {
    NodeSet A = J;
    A.insert(i);
    std::vector<double> pt(x.begin(), x.end());
    double rJ = marginal(J, x);
    double v = integrate(
        [&](double s) {
            pt[i - 1] = s;
            return marginal(A, pt);
        },
        0.0, x[i - 1], tol_);
    return v / rJ;
}

double QuadratureOracle::conditional_quantile(int i, NodeSet J, double u, std::span<const double> x) const {
    std::vector<double> pt(x.begin(), x.end());
    double scale = 1.0;
    for (int j : J.to_vector()) scale = std::max(scale, x[j - 1]);
    auto f = [&](double s) {
        pt[i - 1] = s;
        return conditional_cdf(i, J, pt);
    };
    return invert_monotone(f, u, 0.5 * scale, 2.0 * scale, Expand::Positive, 1e-11);
}

double QuadratureOracle::copula_density_at(int i1, int i2, NodeSet J, std::span<const double> x) const {
    NodeSet A1 = J, A2 = J;
    A1.insert(i1);
    A2.insert(i2);
    NodeSet A = A1 | A2;
    return marginal(A, x) * marginal(J, x) / (marginal(A1, x) * marginal(A2, x));
}

double QuadratureOracle::copula_density(int i1, int i2, NodeSet J, double u1, double u2,
                                        std::span<const double> x) const {
    std::vector<double> pt(x.begin(), x.end());
    pt[i1 - 1] = conditional_quantile(i1, J, u1, x);
    pt[i2 - 1] = conditional_quantile(i2, J, u2, x);
    return copula_density_at(i1, i2, J, pt);
}

double conditional_copula_density(const XVineSpec& spec, int i1, int i2, NodeSet J, double u1, double u2,
                                  std::span<const double> x) {
    if (spec.dim() > 4) fail(ErrorKind::DimensionTooLarge, "quadrature path limited to d <= 4");
    QuadratureOracle q([&spec](std::span<const double> p) { return spec.density(p); }, spec.dim());
    return q.copula_density(i1, i2, J, u1, u2, x);
}

}  // namespace xvine
