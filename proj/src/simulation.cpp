#include "xvine/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "xvine/error.hpp"
#include "xvine/parallel.hpp"

namespace xvine {

ConditionalPlan plan_conditional(const XVineSpec& spec, int j) {
    const VineSequence& v = spec.vine();
    if (!v.nodes().contains(j)) fail(ErrorKind::InvalidIndex, "pivot " + std::to_string(j) + " is not a node");
    StructureMatrix m = to_structure_matrix(v, j);
    ConditionalPlan plan;
    plan.pivot = j;
    plan.order = m.diagonal();
    plan.cond.resize(m.d);
    plan.edges.resize(m.d);
    for (int k = 2; k <= m.d; ++k) {
        NodeSet D;
        for (int t = 1; t <= std::min(m.trunc, k - 1); ++t) D.insert(m.at(t, k));
        plan.cond[k - 1] = D;
        plan.edges[k - 1] = spec.conditional_edge(m.at(k, k), D);
    }
    return plan;
}

namespace {

void draw_into(Evaluator& ev, const ConditionalPlan& plan, std::span<const double> w) {
    std::vector<double> zero(w.size(), 1.0);
    ev.reset(zero);
    ev.set(plan.pivot, w[plan.pivot - 1]);
    for (std::size_t k = 1; k < plan.order.size(); ++k) {
        int node = plan.order[k];
        ev.set(node, ev.quantile(plan.edges[k], node, w[node - 1]));
    }
}

}  // namespace

std::vector<double> conditional_draw(const XVineSpec& spec, const ConditionalPlan& plan, std::span<const double> w,
                                     std::vector<std::string>* trace) {
    if (static_cast<int>(w.size()) != spec.dim()) fail(ErrorKind::DomainError, "uniform vector has wrong dimension");
    Evaluator ev(spec);
    ev.trace = trace;
    draw_into(ev, plan, w);
    return {ev.point().begin(), ev.point().end()};
}

Matrix sample_conditional(const XVineSpec& spec, int j, std::size_t n, std::uint64_t seed, int threads) {
    const int d = spec.dim();
    ConditionalPlan plan = plan_conditional(spec, j);
    Matrix out(n, d);
    for (int c = 1; c <= d; ++c) out.names.push_back("Z" + std::to_string(c));
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    Rng root(seed);
    parallel_for(blocks, resolve_threads(threads), [&](std::size_t b) {
        Rng rng = root.substream(b);
        Evaluator ev(spec);
        std::vector<double> w(d);
        const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
        for (std::size_t r = b * kSampleBlock; r < end; ++r) {
            for (auto& x : w) x = rng.uniform();
            draw_into(ev, plan, w);
            std::copy(ev.point().begin(), ev.point().end(), out.row(r).begin());
        }
    });
    return out;
}

SampleResult sample_inverted_pareto(const XVineSpec& spec, std::size_t n, std::uint64_t seed, int threads) {
    const int d = spec.dim();
    std::vector<ConditionalPlan> plans;
    for (int j = 1; j <= d; ++j) plans.push_back(plan_conditional(spec, j));
    SampleResult res;
    res.z = Matrix(n, d);
    for (int c = 1; c <= d; ++c) res.z.names.push_back("Z" + std::to_string(c));
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    std::vector<std::size_t> proposals(blocks, 0);
    Rng root(seed);
    parallel_for(blocks, resolve_threads(threads), [&](std::size_t b) {
        Rng rng = root.substream(b);
        Evaluator ev(spec);
        std::vector<double> w(d);
        const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
        for (std::size_t r = b * kSampleBlock; r < end;) {
            int pivot = static_cast<int>(rng.below(d)) + 1;
            for (auto& x : w) x = rng.uniform();
            draw_into(ev, plans[pivot - 1], w);
            ++proposals[b];
            int below = 0;
            for (double z : ev.point()) below += z < 1.0;
            if (rng.uniform() * below < 1.0) {
                std::copy(ev.point().begin(), ev.point().end(), res.z.row(r).begin());
                ++r;
            }
        }
    });
    for (auto p : proposals) res.proposals += p;
    return res;
}

SampleResult sample_pareto(const XVineSpec& spec, std::size_t n, std::uint64_t seed, int threads) {
    SampleResult res = sample_inverted_pareto(spec, n, seed, threads);
    for (auto& x : res.z.data) x = 1.0 / x;
    for (int c = 1; c <= spec.dim(); ++c) res.z.names[c - 1] = "Y" + std::to_string(c);
    return res;
}

ChiEstimate model_chi(const XVineSpec& spec, std::span<const int> nodes, std::size_t n_mc, std::uint64_t seed,
                      int threads) {
    if (nodes.size() < 2 || nodes.size() > 3) fail(ErrorKind::InvalidIndex, "chi needs two or three nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!spec.vine().nodes().contains(nodes[i])) fail(ErrorKind::InvalidIndex, "unknown node in chi request");
        for (std::size_t j = 0; j < i; ++j)
            if (nodes[i] == nodes[j]) fail(ErrorKind::InvalidIndex, "chi nodes must be distinct");
    }
    // Given Z_a < 1 (a uniform margin), chi = P(all other listed Z < 1 | Z_a < 1).
    Matrix z = sample_conditional(spec, nodes[0], n_mc, seed, threads);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < z.rows; ++r) {
        bool all = true;
        for (std::size_t i = 1; i < nodes.size(); ++i) all = all && z(r, nodes[i] - 1) < 1.0;
        hits += all;
    }
    double p = static_cast<double>(hits) / static_cast<double>(n_mc);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_mc))};
}

}  // namespace xvine
