#include <algorithm>
#include <cmath>

#include "xvine/error.hpp"
#include "xvine/estimation.hpp"
#include "xvine/parallel.hpp"

namespace xvine {

namespace {

double clamp_unit(double u) { return std::clamp(u, kClamp, 1.0 - kClamp); }

// Conditional distributions R_{a|A_f \ a} of every edge f in one tree, evaluated on a fixed
// set of rows. Both orientations are stored.
struct LevelTable {
    int level = 0;
    std::vector<int> slot;  // row -> column in va/vb, -1 when not evaluated
    std::vector<std::vector<double>> va, vb;

    double value(const VineSequence& v, int idx, int node, std::size_t row) const {
        const EdgeKey& k = v.edge({level, idx}).key;
        return (node == k.a ? va : vb)[idx][slot[row]];
    }
};

LevelTable build_table(const PseudoSample& ps, const XVineSpec& fitted, int level,
                       const std::vector<std::size_t>& rows, int threads) {
    LevelTable t;
    t.level = level;
    t.slot.assign(ps.n, -1);
    for (std::size_t s = 0; s < rows.size(); ++s) t.slot[rows[s]] = static_cast<int>(s);
    auto edges = fitted.vine().tree(level);
    t.va.assign(edges.size(), std::vector<double>(rows.size()));
    t.vb.assign(edges.size(), std::vector<double>(rows.size()));
    const std::size_t nblocks = (rows.size() + 255) / 256;
    parallel_for(nblocks, threads, [&](std::size_t blk) {
        Evaluator ev(fitted);
        const std::size_t hi = std::min(rows.size(), (blk + 1) * 256);
        for (std::size_t s = blk * 256; s < hi; ++s) {
            ev.reset(ps.z_hat.row(rows[s]));
            for (std::size_t i = 0; i < edges.size(); ++i) {
                EdgePos p{level, static_cast<int>(i)};
                t.va[i][s] = clamp_unit(ev.cdf(p, edges[i].key.a));
                t.vb[i][s] = clamp_unit(ev.cdf(p, edges[i].key.b));
            }
        }
    });
    return t;
}

std::vector<std::size_t> exceedance_rows(const PseudoSample& ps) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < ps.n; ++i)
        if (ps.mask[i]) rows.push_back(i);
    return rows;
}

struct ChildPair {
    int f, g;
};

ChildPair children_of(const VineSequence& v, const EdgeKey& e) {
    const int lv = e.level() - 1;
    NodeSet Aa = e.cond, Ab = e.cond;
    Aa.insert(e.a);
    Ab.insert(e.b);
    auto f = v.by_complete(lv, Aa), g = v.by_complete(lv, Ab);
    if (!f || !g) fail(ErrorKind::InvalidIndex, "edge " + e.label() + " does not join two edges of tree " + std::to_string(lv));
    return {*f, *g};
}

PairData table_pair(const PseudoSample& ps, const VineSequence& v, const LevelTable& t, const EdgeKey& e) {
    ChildPair c = children_of(v, e);
    PairData out;
    out.rows = ps.rows_all(e.cond);
    out.u.reserve(out.rows.size());
    out.v.reserve(out.rows.size());
    for (std::size_t r : out.rows) {
        out.u.push_back(t.value(v, c.f, e.a, r));
        out.v.push_back(t.value(v, c.g, e.b, r));
    }
    return out;
}

// Proximity-feasible pairs of tree `level` edges, as keys of the would-be next-tree edge.
struct Candidate {
    int f, g;
    EdgeKey key;
};

std::vector<Candidate> candidates(const VineSequence& v, int level) {
    auto t = v.tree(level);
    std::vector<Candidate> out;
    for (std::size_t f = 0; f < t.size(); ++f)
        for (std::size_t g = f + 1; g < t.size(); ++g) {
            bool adjacent;
            if (level == 1) {
                adjacent = !(t[f].key.conditioned() & t[g].key.conditioned()).empty();
            } else {
                adjacent = t[f].left == t[g].left || t[f].left == t[g].right || t[f].right == t[g].left ||
                           t[f].right == t[g].right;
            }
            if (!adjacent) continue;
            NodeSet af = t[f].key.complete(), ag = t[g].key.complete();
            NodeSet D = af & ag;
            std::vector<int> ab = ((af | ag) - D).to_vector();
            if (ab.size() != 2) continue;
            out.push_back({static_cast<int>(f), static_cast<int>(g), make_key(ab[0], ab[1], D)});
        }
    return out;
}

std::vector<std::pair<int, int>> learn_from_table(const PseudoSample& ps, const VineSequence& v, const LevelTable& t,
                                                  int threads) {
    const int level = t.level;
    std::vector<Candidate> cand = candidates(v, level);
    std::vector<WeightedEdge> w(cand.size());
    parallel_for(cand.size(), threads, [&](std::size_t i) {
        PairData pd = table_pair(ps, v, t, cand[i].key);
        double tau = pd.u.size() >= 2 ? kendall_tau(pd.u, pd.v) : 0.0;
        w[i] = {cand[i].f, cand[i].g, std::fabs(tau), cand[i].key};
    });
    const int n = static_cast<int>(v.tree(level).size());
    std::vector<std::pair<int, int>> out;
    for (std::size_t i : maximum_spanning_tree(n, w)) out.emplace_back(w[i].u, w[i].v);
    return out;
}

std::vector<std::string> losers(const std::vector<std::string>& names, const std::string& best) {
    std::vector<std::string> out;
    for (const auto& s : names)
        if (s != best) out.push_back(s);
    return out;
}

}  // namespace

PairData pseudo_obs_next_tree(const PseudoSample& ps, const XVineSpec& fitted, const EdgeKey& e) {
    const int j = e.level();
    if (j < 2) fail(ErrorKind::InvalidIndex, "pseudo-observations are defined for trees 2 and above");
    if (fitted.levels() < j - 1)
        fail(ErrorKind::TruncatedVine, "fitted model stops below tree " + std::to_string(j - 1));
    ChildPair c = children_of(fitted.vine(), e);
    PairData out;
    out.rows = ps.rows_all(e.cond);
    if (out.rows.empty()) fail(ErrorKind::EmptyConditioningSet, "no joint exceedances in " + e.cond.str());
    Evaluator ev(fitted);
    for (std::size_t r : out.rows) {
        ev.reset(ps.z_hat.row(r));
        out.u.push_back(clamp_unit(ev.cdf({j - 1, c.f}, e.a)));
        out.v.push_back(clamp_unit(ev.cdf({j - 1, c.g}, e.b)));
    }
    return out;
}

std::vector<std::pair<int, int>> learn_tree_j(const PseudoSample& ps, const XVineSpec& fitted, int threads) {
    threads = resolve_threads(threads);
    const int level = fitted.levels();
    if (level >= fitted.dim() - 1) fail(ErrorKind::InfeasibleLevel, "vine is already complete");
    LevelTable t = build_table(ps, fitted, level, exceedance_rows(ps), threads);
    return learn_from_table(ps, fitted.vine(), t, threads);
}

std::vector<double> mbic_curve(const std::vector<EdgeReport>& edges, int Q, double psi0) {
    if (!(psi0 > 0.0 && psi0 < 1.0)) fail(ErrorKind::DomainError, "psi0 must lie in (0,1)");
    std::vector<double> level_term(std::max(Q, 1) + 1, 0.0);
    for (const auto& e : edges) {
        const int j = e.key.level();
        if (j < 2 || j > Q) continue;
        const double psi = std::pow(psi0, j - 1);
        double term = -2.0 * e.loglik - 2.0 * std::log1p(-psi);
        if (e.family != "indep")
            term += std::log(static_cast<double>(e.n_eff)) - 2.0 * std::log(psi / (1.0 - psi));
        level_term[j] += term;
    }
    std::vector<double> curve(std::max(Q, 1), 0.0);
    for (int q = 2; q <= Q; ++q) curve[q - 1] = curve[q - 2] + level_term[q];
    return curve;
}

int optimal_truncation(const std::vector<double>& curve) {
    if (curve.empty()) return 1;
    return static_cast<int>(std::min_element(curve.begin(), curve.end()) - curve.begin()) + 1;
}

XVineSpec FitReport::model() const {
    std::map<EdgeKey, TailFamily> tails;
    std::map<EdgeKey, PairFamily> pairs;
    for (const auto& e : edges) {
        if (e.key.level() == 1) {
            TailKind k;
            if (!parse_tail_kind(e.family, k)) fail(ErrorKind::InvalidSpec, "edge " + e.key.label() + " was not fitted");
            tails.emplace(e.key, TailFamily{k, e.theta});
        } else {
            PairKind k;
            if (!parse_pair_kind(e.family, k)) fail(ErrorKind::InvalidSpec, "edge " + e.key.label() + " was not fitted");
            pairs.emplace(e.key, PairFamily{k, e.theta});
        }
    }
    return XVineSpec(vine, tails, pairs);
}

const EdgeReport& FitReport::edge(const EdgeKey& k) const {
    for (const auto& e : edges)
        if (e.key == k) return e;
    fail(ErrorKind::UnknownEdge, "no fitted edge " + k.label());
}

FitReport fit_pipeline(const PseudoSample& ps, const FitOptions& opts) {
    const int d = ps.d;
    const int threads = resolve_threads(opts.threads);
    if (d < 2) fail(ErrorKind::DomainError, "fitting needs d >= 2");
    if (opts.structure && opts.structure->nodes() != NodeSet::range(d))
        fail(ErrorKind::InvalidSpec, "structure does not match the data dimension " + std::to_string(d));
    int available = opts.structure ? opts.structure->levels() : d - 1;
    int max_level = available;
    if (opts.trunc_mode == TruncationMode::Fixed) {
        if (opts.trunc_q < 1 || opts.trunc_q > d - 1)
            fail(ErrorKind::DomainError, "truncation level must lie in 1.." + std::to_string(d - 1));
        max_level = std::min(opts.trunc_q, available);
    }

    FitReport rep;
    std::vector<std::vector<EdgeKey>> trees;

    // Tree 1.
    std::vector<EdgeKey> t1;
    if (opts.structure) {
        for (const auto& e : opts.structure->tree(1)) t1.push_back(e.key);
    } else {
        for (auto [a, b] : learn_tree1(ps)) t1.push_back(make_key(a, b));
    }
    std::sort(t1.begin(), t1.end());
    std::vector<EdgeReport> level_rep(t1.size());
    parallel_for(t1.size(), threads, [&](std::size_t i) {
        EdgeReport& r = level_rep[i];
        r.key = t1[i];
        r.n_eff = ps.rows_any(t1[i].conditioned()).size();
        std::vector<TailKind> cat = opts.tail_catalogue;
        if (auto it = opts.fixed_tail.find(t1[i]); it != opts.fixed_tail.end()) cat = {it->second};
        try {
            TailSelection sel = select_tail_family(ps, r.key.a, r.key.b, cat, opts.aic);
            r.family = to_string(sel.best.family.kind);
            r.theta = sel.best.family.theta;
            r.loglik_a = sel.best.loglik_a;
            r.loglik_b = sel.best.loglik_b;
            r.loglik = 0.5 * (r.loglik_a + r.loglik_b);
            r.aic = sel.best.aic;
            r.boundary = sel.best.boundary;
            std::vector<std::string> names;
            for (const auto& f : sel.table) names.push_back(to_string(f.family.kind));
            r.selected_over = losers(names, r.family);
        } catch (const Error& e) {
            r.error = e.what();
        }
    });
    trees.push_back(t1);
    bool tail_failed = false;
    std::map<EdgeKey, TailFamily> tails;
    for (const auto& r : level_rep) {
        if (!r.error.empty()) {
            tail_failed = true;
            rep.errors.push_back("edge " + r.key.label() + ": " + r.error);
        } else {
            TailKind k;
            parse_tail_kind(r.family, k);
            tails.emplace(r.key, TailFamily{k, r.theta});
        }
        rep.edges.push_back(r);
    }
    if (tail_failed && max_level > 1) rep.errors.push_back("deeper trees skipped after a tree-1 failure");

    std::map<EdgeKey, PairFamily> pairs;
    int fitted_levels = 1;
    const std::vector<std::size_t> ex_rows = exceedance_rows(ps);
    for (int j = 2; j <= max_level && !tail_failed; ++j) {
        XVineSpec fitted(VineSequence::from_edges(d, trees), tails, pairs);
        LevelTable table = build_table(ps, fitted, j - 1, ex_rows, threads);
        std::vector<EdgeKey> tj;
        if (opts.structure) {
            for (const auto& e : opts.structure->tree(j)) tj.push_back(e.key);
        } else {
            for (auto [f, g] : learn_from_table(ps, fitted.vine(), table, threads)) {
                NodeSet af = fitted.vine().edge({j - 1, f}).key.complete();
                NodeSet ag = fitted.vine().edge({j - 1, g}).key.complete();
                NodeSet D = af & ag;
                std::vector<int> ab = ((af | ag) - D).to_vector();
                tj.push_back(make_key(ab[0], ab[1], D));
            }
        }
        std::sort(tj.begin(), tj.end());
        std::vector<EdgeReport> lr(tj.size());
        parallel_for(tj.size(), threads, [&](std::size_t i) {
            EdgeReport& r = lr[i];
            r.key = tj[i];
            PairData pd = table_pair(ps, fitted.vine(), table, r.key);
            r.n_eff = pd.rows.size();
            std::vector<PairKind> cat = opts.pair_catalogue;
            SelectionRules rules = opts.rules;
            if (auto it = opts.fixed_pair.find(r.key); it != opts.fixed_pair.end()) {
                cat = {it->second};
                rules = {-1.0, 0};
            }
            try {
                PairSelection sel = select_pair_family(pd.u, pd.v, cat, rules);
                r.family = to_string(sel.best.family.kind);
                r.theta = sel.best.family.theta;
                r.loglik = sel.best.loglik;
                r.aic = sel.best.aic;
                r.boundary = sel.best.boundary;
                r.forced = sel.forced;
                r.tau_hat = sel.tau;
                std::vector<std::string> names;
                for (const auto& f : sel.table) names.push_back(to_string(f.family.kind));
                r.selected_over = losers(names, r.family);
            } catch (const Error& e) {
                r.error = e.what();
                r.family = to_string(PairKind::Independence);
                r.theta = 0.0;
                r.loglik = 0.0;
                r.aic = 0.0;
                r.tau_hat = pd.u.size() >= 2 ? kendall_tau(pd.u, pd.v) : 0.0;
            }
        });
        for (const auto& r : lr) {
            if (!r.error.empty()) rep.errors.push_back("edge " + r.key.label() + ": " + r.error + " (independence used)");
            PairKind k;
            parse_pair_kind(r.family, k);
            pairs.emplace(r.key, PairFamily{k, r.theta});
            rep.edges.push_back(r);
        }
        trees.push_back(tj);
        fitted_levels = j;
    }

    rep.mbic = mbic_curve(rep.edges, fitted_levels, opts.psi0);
    rep.q_star = optimal_truncation(rep.mbic);
    int q = fitted_levels;
    if (opts.trunc_mode == TruncationMode::Mbic) {
        q = rep.q_star;
    } else if (opts.trunc_mode == TruncationMode::Auto) {
        q = 1;
        for (const auto& e : rep.edges)
            if (e.key.level() >= 2 && e.family != "indep") q = std::max(q, e.key.level());
    }
    trees.resize(q);
    rep.vine = VineSequence::from_edges(d, trees);
    std::erase_if(rep.edges, [q](const EdgeReport& e) { return e.key.level() > q; });
    return rep;
}

}  // namespace xvine
