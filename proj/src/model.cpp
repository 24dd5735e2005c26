#include "xvine/model.hpp"

#include <cmath>
#include <limits>

#include "xvine/error.hpp"

namespace xvine {

namespace {

std::string r_label(const char* head, int i, NodeSet D) { return std::string(head) + "{" + std::to_string(i) + "|" + D.str() + "}"; }

std::string c_label(const char* head, int i, int o, NodeSet D) {
    return std::string(head) + "{" + std::to_string(i) + "|" + std::to_string(o) + ";" + D.str() + "}";
}

}  // namespace

XVineSpec::XVineSpec(VineSequence vine, std::map<EdgeKey, TailFamily> tails, std::map<EdgeKey, PairFamily> pairs)
    : vine_(std::move(vine)), tails_(std::move(tails)), pairs_(std::move(pairs)) {
    const int d = vine_.dim();
    if (vine_.nodes() != NodeSet::range(d)) fail(ErrorKind::InvalidSpec, "X-vine nodes must be labelled 1..d");
    std::size_t want_pairs = 0;
    for (const auto& e : vine_.tree(1)) {
        auto it = tails_.find(e.key);
        if (it == tails_.end()) fail(ErrorKind::InvalidSpec, "no tail family for edge " + e.key.label());
        check_tail(it->second);
        tail_by_pos_.push_back(it->second);
    }
    for (int lv = 2; lv <= vine_.levels(); ++lv) {
        std::vector<PairFamily> row;
        std::vector<int> ca, cb;
        for (const auto& e : vine_.tree(lv)) {
            auto it = pairs_.find(e.key);
            if (it == pairs_.end()) fail(ErrorKind::InvalidSpec, "no pair family for edge " + e.key.label());
            check_pair(it->second);
            row.push_back(it->second);
            NodeSet Aa = e.key.cond, Ab = e.key.cond;
            Aa.insert(e.key.a);
            Ab.insert(e.key.b);
            auto ia = vine_.by_complete(lv - 1, Aa);
            auto ib = vine_.by_complete(lv - 1, Ab);
            if (!ia || !ib) fail(ErrorKind::InvalidSpec, "recursion unavailable for edge " + e.key.label());
            ca.push_back(*ia);
            cb.push_back(*ib);
            ++want_pairs;
        }
        pair_by_pos_.push_back(std::move(row));
        child_a_.push_back(std::move(ca));
        child_b_.push_back(std::move(cb));
    }
    if (tails_.size() != vine_.tree(1).size()) fail(ErrorKind::InvalidSpec, "tail families given for edges outside tree 1");
    if (pairs_.size() != want_pairs) fail(ErrorKind::InvalidSpec, "pair families given for edges outside the vine");
}

const TailFamily& XVineSpec::tail(const EdgeKey& e) const {
    auto it = tails_.find(make_key(e.a, e.b, e.cond));
    if (it == tails_.end()) fail(ErrorKind::UnknownEdge, "no tree-1 edge " + e.label());
    return it->second;
}

const PairFamily& XVineSpec::pair(const EdgeKey& e) const {
    auto it = pairs_.find(make_key(e.a, e.b, e.cond));
    if (it == pairs_.end()) fail(ErrorKind::UnknownEdge, "no pair-copula edge " + e.label());
    return it->second;
}

XVineSpec XVineSpec::truncate(int q) const {
    VineSequence v = vine_.truncate(q);
    std::map<EdgeKey, PairFamily> p;
    for (const auto& [k, f] : pairs_)
        if (k.level() <= q) p.emplace(k, f);
    return XVineSpec(v, tails_, p);
}

EdgePos XVineSpec::conditional_edge(int i, NodeSet D) const {
    NodeSet A = D;
    A.insert(i);
    if (D.empty() || D.contains(i)) fail(ErrorKind::InvalidIndex, "conditioning set must be non-empty and exclude i");
    auto idx = vine_.by_complete(D.size(), A);
    if (!idx) fail(ErrorKind::InvalidIndex, "R_{" + std::to_string(i) + "|" + D.str() + "} is not reachable in this vine");
    EdgePos p{D.size(), *idx};
    const EdgeKey& k = vine_.edge(p).key;
    if (k.a != i && k.b != i)
        fail(ErrorKind::InvalidIndex, "node " + std::to_string(i) + " is conditioning, not conditioned, in " + k.label());
    return p;
}

double XVineSpec::density(std::span<const double> x) const { return std::exp(log_density(x)); }

double XVineSpec::log_density(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) fail(ErrorKind::DomainError, "point has wrong dimension");
    for (double v : x)
        if (!(v > 0.0) || !std::isfinite(v)) return -std::numeric_limits<double>::infinity();
    Evaluator ev(*this);
    ev.reset(x);
    return ev.log_density();
}

double XVineSpec::conditional_cdf(int i, NodeSet D, std::span<const double> x, std::vector<std::string>* trace) const {
    EdgePos p = conditional_edge(i, D);
    Evaluator ev(*this);
    ev.reset(x);
    ev.trace = trace;
    return ev.cdf(p, i);
}

double XVineSpec::conditional_quantile(int i, NodeSet D, double u, std::span<const double> x,
                                       std::vector<std::string>* trace) const {
    if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::DomainError, "quantile level must lie in (0,1)");
    EdgePos p = conditional_edge(i, D);
    Evaluator ev(*this);
    ev.reset(x);
    ev.trace = trace;
    return ev.quantile(p, i, u);
}

double XVineSpec::exponent_measure_density(std::span<const double> y) const {
    std::vector<double> inv(y.size());
    double scale = 1.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (!(y[j] > 0.0)) fail(ErrorKind::DomainError, "exponent measure needs positive arguments");
        inv[j] = 1.0 / y[j];
        scale *= inv[j] * inv[j];
    }
    return density(inv) * scale;
}

double XVineSpec::exponent_measure_density_degree_form(std::span<const double> y) const {
    const int d = dim();
    if (static_cast<int>(y.size()) != d) fail(ErrorKind::DomainError, "point has wrong dimension");
    std::vector<int> deg(d, 0);
    double logv = 0.0;
    std::vector<double> inv(d);
    for (int j = 0; j < d; ++j) {
        if (!(y[j] > 0.0)) fail(ErrorKind::DomainError, "exponent measure needs positive arguments");
        inv[j] = 1.0 / y[j];
    }
    auto t1 = vine_.tree(1);
    for (std::size_t i = 0; i < t1.size(); ++i) {
        int a = t1[i].key.a, b = t1[i].key.b;
        ++deg[a - 1];
        ++deg[b - 1];
        // Bivariate exponent measure density lambda_ab(y_a, y_b).
        logv += tail_log_density(tail_by_pos_[i], inv[a - 1], inv[b - 1]) - 2.0 * std::log(y[a - 1]) -
                2.0 * std::log(y[b - 1]);
    }
    for (int j = 0; j < d; ++j) logv += (2.0 * deg[j] - 2.0) * std::log(y[j]);
    // Exponent-measure conditional distributions equal R_{i|D}(1/y_i | 1/y_D).
    Evaluator ev(*this);
    ev.reset(inv);
    for (int lv = 2; lv <= levels(); ++lv) {
        auto t = vine_.tree(lv);
        for (std::size_t i = 0; i < t.size(); ++i) {
            EdgePos p{lv, static_cast<int>(i)};
            EdgePos pa{lv - 1, child_a(p)}, pb{lv - 1, child_b(p)};
            logv += pair_log_density(pair_at(p), ev.cdf(pa, t[i].key.a), ev.cdf(pb, t[i].key.b));
        }
    }
    return std::exp(logv);
}

// ---------------------------------------------------------------------------------------------

Evaluator::Evaluator(const XVineSpec& spec) : spec_(spec), x_(spec.dim(), 0.0) {
    for (int lv = 1; lv <= spec.levels(); ++lv) {
        out_a_.emplace_back(spec.vine().tree(lv).size(), NAN);
        out_b_.emplace_back(spec.vine().tree(lv).size(), NAN);
    }
}

void Evaluator::reset(std::span<const double> x) {
    if (static_cast<int>(x.size()) != spec_.dim()) fail(ErrorKind::DomainError, "point has wrong dimension");
    std::copy(x.begin(), x.end(), x_.begin());
    for (auto& v : out_a_) std::fill(v.begin(), v.end(), NAN);
    for (auto& v : out_b_) std::fill(v.begin(), v.end(), NAN);
}

double Evaluator::cdf(EdgePos p, int node) {
    const EdgeKey& k = spec_.vine().edge(p).key;
    const bool is_a = node == k.a;
    if (!is_a && node != k.b) fail(ErrorKind::InvalidIndex, "node not conditioned by edge " + k.label());
    double& slot = (is_a ? out_a_ : out_b_)[p.level - 1][p.index];
    if (!std::isnan(slot)) return slot;
    const int other = is_a ? k.b : k.a;
    double val;
    if (p.level == 1) {
        val = tail_h(spec_.tail_at(p.index), x_[node - 1], x_[other - 1]);
        if (trace) trace->push_back(r_label("R_", node, NodeSet{other}));
    } else {
        EdgePos pa{p.level - 1, spec_.child_a(p)}, pb{p.level - 1, spec_.child_b(p)};
        double ua = cdf(pa, k.a);
        double ub = cdf(pb, k.b);
        const PairFamily& c = spec_.pair_at(p);
        val = is_a ? pair_h(c, ua, ub) : pair_h(c, ub, ua);
        if (trace) trace->push_back(c_label("C_", node, other, k.cond));
    }
    slot = val;
    return val;
}

double Evaluator::quantile(EdgePos p, int node, double u) {
    const EdgeKey& k = spec_.vine().edge(p).key;
    const bool is_a = node == k.a;
    if (!is_a && node != k.b) fail(ErrorKind::InvalidIndex, "node not conditioned by edge " + k.label());
    const int other = is_a ? k.b : k.a;
    if (p.level == 1) {
        double x = tail_h_inv(spec_.tail_at(p.index), u, x_[other - 1]);
        if (trace) trace->push_back(r_label("Rinv_", node, NodeSet{other}));
        return x;
    }
    EdgePos pa{p.level - 1, spec_.child_a(p)}, pb{p.level - 1, spec_.child_b(p)};
    double v_other = is_a ? cdf(pb, k.b) : cdf(pa, k.a);
    double w = pair_h_inv(spec_.pair_at(p), u, v_other);
    if (trace) trace->push_back(c_label("Cinv_", node, other, k.cond));
    return quantile(is_a ? pa : pb, node, w);
}

double Evaluator::log_density() {
    double s = 0.0;
    auto t1 = spec_.vine().tree(1);
    for (std::size_t i = 0; i < t1.size(); ++i)
        s += tail_log_density(spec_.tail_at(static_cast<int>(i)), x_[t1[i].key.a - 1], x_[t1[i].key.b - 1]);
    for (int lv = 2; lv <= spec_.levels(); ++lv) {
        auto t = spec_.vine().tree(lv);
        for (std::size_t i = 0; i < t.size(); ++i) {
            EdgePos p{lv, static_cast<int>(i)};
            const PairFamily& c = spec_.pair_at(p);
            if (c.kind == PairKind::Independence) continue;
            EdgePos pa{lv - 1, spec_.child_a(p)}, pb{lv - 1, spec_.child_b(p)};
            s += pair_log_density(c, cdf(pa, t[i].key.a), cdf(pb, t[i].key.b));
        }
    }
    return s;
}

}  // namespace xvine
