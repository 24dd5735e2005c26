#include <algorithm>
#include <cmath>
#include <numeric>

#include "xvine/error.hpp"
#include "xvine/estimation.hpp"
#include "xvine/numerics.hpp"

namespace xvine {

namespace {

constexpr std::size_t kMinRows = 10;
constexpr double kBoundaryTol = 1e-4;

bool near_boundary(const ScalarProblem& p, double x) {
    if (p.transform == Transform::Log) {
        double t = std::log(x - p.shift);
        return t - std::log(p.lo - p.shift) < kBoundaryTol || std::log(p.hi - p.shift) - t < kBoundaryTol;
    }
    return x - p.lo < kBoundaryTol || p.hi - x < kBoundaryTol;
}

struct SubFit {
    double theta, loglik;
    bool boundary;
};

SubFit fit_tail_subsample(const PseudoSample& ps, const std::vector<std::size_t>& rows, int a, int b, TailKind kind) {
    if (rows.size() < kMinRows)
        fail(ErrorKind::InsufficientData, "tail edge " + make_key(a, b).label() + " has " + std::to_string(rows.size()) +
                                              " exceedances, need " + std::to_string(kMinRows));
    std::vector<double> xa(rows.size()), xb(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        xa[i] = ps.z_hat(rows[i], a - 1);
        xb[i] = ps.z_hat(rows[i], b - 1);
    }
    auto negll = [&, kind](double theta) {
        TailFamily f{kind, theta};
        double s = 0.0;
        for (std::size_t i = 0; i < xa.size(); ++i) s += tail_log_density(f, xa[i], xb[i]);
        return -s;
    };
    ParamBox box = search_box(kind);
    double shift = kind == TailKind::Logistic ? 1.0 : 0.0;
    ScalarProblem p{negll, box.lo, box.hi, Transform::Log, shift};
    ScalarMinimum m = minimize_scalar(p);
    return {m.argmin, -m.value, near_boundary(p, m.argmin)};
}

}  // namespace

TailFit fit_tail_edge(const PseudoSample& ps, int a, int b, TailKind kind, AicConvention conv) {
    if (a < 1 || b < 1 || a > ps.d || b > ps.d || a == b) fail(ErrorKind::InvalidIndex, "bad tail edge nodes");
    if (a > b) std::swap(a, b);
    SubFit fa = fit_tail_subsample(ps, ps.exceed[a - 1], a, b, kind);
    SubFit fb = fit_tail_subsample(ps, ps.exceed[b - 1], a, b, kind);
    TailFit out;
    out.family = {kind, 0.5 * (fa.theta + fb.theta)};
    out.theta_a = fa.theta;
    out.theta_b = fb.theta;
    out.loglik_a = fa.loglik;
    out.loglik_b = fb.loglik;
    out.n_a = ps.exceed[a - 1].size();
    out.n_b = ps.exceed[b - 1].size();
    out.boundary = fa.boundary || fb.boundary;
    const double nu = 1.0;
    double ll = fa.loglik + fb.loglik;
    out.aic = conv == AicConvention::Paper ? 2.0 * nu - 0.5 * ll : 2.0 * nu - ll;
    return out;
}

PairFit fit_pair_edge(std::span<const double> u, std::span<const double> v, PairKind kind) {
    if (u.size() != v.size()) fail(ErrorKind::DomainError, "pair data columns differ in length");
    PairFit out;
    out.n = u.size();
    out.family = {kind, 0.0};
    if (kind == PairKind::Independence) return out;
    if (u.size() < kMinRows)
        fail(ErrorKind::InsufficientData,
             "pair edge has " + std::to_string(u.size()) + " observations, need " + std::to_string(kMinRows));
    const PairKind base = kind == PairKind::SurvClayton  ? PairKind::Clayton
                          : kind == PairKind::SurvGumbel ? PairKind::Gumbel
                          : kind == PairKind::SurvJoe    ? PairKind::Joe
                                                         : kind;
    auto loglik = [&, kind](double theta) {
        PairFamily c{kind, theta};
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += pair_log_density(c, u[i], v[i]);
        return s;
    };
    ParamBox box = search_box(kind);
    ScalarProblem p;
    std::function<double(double)> to_theta = [](double t) { return t; };
    switch (base) {
        case PairKind::Gaussian:
            p = {[&](double t) { return -loglik(std::tanh(t)); }, std::atanh(box.lo), std::atanh(box.hi),
                 Transform::Identity, 0.0};
            to_theta = [](double t) { return std::tanh(t); };
            break;
        case PairKind::Frank:
            // Zero is independence, which the Frank density handles only as a limit.
            p = {[&](double t) { return -loglik(t == 0.0 ? 1e-9 : t); }, box.lo, box.hi, Transform::Identity, 0.0};
            break;
        case PairKind::Clayton:
            p = {[&](double t) { return -loglik(t); }, box.lo, box.hi, Transform::Log, 0.0};
            break;
        default:  // Gumbel, Joe: theta > 1 on log(theta - 1)
            p = {[&](double t) { return -loglik(t); }, 1.0 + 1e-6, box.hi, Transform::Log, 1.0};
            break;
    }
    ScalarMinimum m = minimize_scalar(p);
    double theta = to_theta(m.argmin);
    if (base == PairKind::Frank && theta == 0.0) theta = 1e-9;
    out.family.theta = theta;
    out.loglik = -m.value;
    out.aic = 2.0 * parameter_count(kind) - 2.0 * out.loglik;
    out.boundary = near_boundary(p, m.argmin);
    return out;
}

TailSelection select_tail_family(const PseudoSample& ps, int a, int b, std::span<const TailKind> catalogue,
                                 AicConvention conv) {
    if (catalogue.empty()) fail(ErrorKind::DomainError, "empty tail family catalogue");
    TailSelection sel;
    for (TailKind k : catalogue) sel.table.push_back(fit_tail_edge(ps, a, b, k, conv));
    sel.best = *std::min_element(sel.table.begin(), sel.table.end(),
                                 [](const TailFit& x, const TailFit& y) { return x.aic < y.aic; });
    return sel;
}

PairSelection select_pair_family(std::span<const double> u, std::span<const double> v,
                                 std::span<const PairKind> catalogue, SelectionRules rules) {
    if (catalogue.empty()) fail(ErrorKind::DomainError, "empty pair family catalogue");
    PairSelection sel;
    sel.tau = u.size() >= 2 ? kendall_tau(u, v) : 0.0;
    if (u.size() < rules.n_min || std::fabs(sel.tau) < rules.tau_min) {
        sel.forced = true;
        sel.best = fit_pair_edge(u, v, PairKind::Independence);
        sel.table.push_back(sel.best);
        return sel;
    }
    for (PairKind k : catalogue) sel.table.push_back(fit_pair_edge(u, v, k));
    sel.best = *std::min_element(sel.table.begin(), sel.table.end(),
                                 [](const PairFit& x, const PairFit& y) { return x.aic < y.aic; });
    return sel;
}

std::vector<std::size_t> maximum_spanning_tree(int n, std::vector<WeightedEdge> edges) {
    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (edges[x].w != edges[y].w) return edges[x].w > edges[y].w;
        return edges[x].key < edges[y].key;
    });
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::size_t> out;
    for (std::size_t i : order) {
        int ru = find(edges[i].u), rv = find(edges[i].v);
        if (ru == rv) continue;
        parent[ru] = rv;
        out.push_back(i);
        if (static_cast<int>(out.size()) == n - 1) break;
    }
    if (n > 0 && static_cast<int>(out.size()) != n - 1)
        fail(ErrorKind::InfeasibleLevel, "candidate graph is not connected");
    return out;
}

std::vector<std::pair<int, int>> learn_tree1(const PseudoSample& ps) {
    if (ps.d < 2) fail(ErrorKind::DomainError, "structure learning needs d >= 2");
    std::vector<WeightedEdge> cand;
    for (int a = 1; a <= ps.d; ++a)
        for (int b = a + 1; b <= ps.d; ++b) {
            int nodes[2] = {a, b};
            cand.push_back({a - 1, b - 1, empirical_chi(ps, nodes), make_key(a, b)});
        }
    std::vector<std::pair<int, int>> out;
    for (std::size_t i : maximum_spanning_tree(ps.d, cand)) out.emplace_back(cand[i].key.a, cand[i].key.b);
    return out;
}

}  // namespace xvine
