#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "xvine/families.hpp"
#include "xvine/vine.hpp"

namespace xvine {

/// Vine on {1..d} with a tail copula density on every tree-1 edge and a pair copula on every
/// edge of trees 2..q.
class XVineSpec {
public:
    XVineSpec(VineSequence vine, std::map<EdgeKey, TailFamily> tails, std::map<EdgeKey, PairFamily> pairs);

    const VineSequence& vine() const { return vine_; }
    int dim() const { return vine_.dim(); }
    int levels() const { return vine_.levels(); }

    const TailFamily& tail(const EdgeKey& e) const;
    const PairFamily& pair(const EdgeKey& e) const;
    const TailFamily& tail_at(int index) const { return tail_by_pos_.at(index); }
    const PairFamily& pair_at(EdgePos p) const { return pair_by_pos_.at(p.level - 2).at(p.index); }
    const std::map<EdgeKey, TailFamily>& tails() const { return tails_; }
    const std::map<EdgeKey, PairFamily>& pairs() const { return pairs_; }

    /// Drops trees above q.
    XVineSpec truncate(int q) const;

    /// Zero when any coordinate is nonpositive.
    double density(std::span<const double> x) const;
    double log_density(std::span<const double> x) const;

    /// R_{i|D}(x_i | x_D). x holds all d coordinates (indexed by label - 1); only i and D are
    /// read. D u {i} must be the complete union of a vine edge with i in its conditioned set.
    double conditional_cdf(int i, NodeSet D, std::span<const double> x, std::vector<std::string>* trace = nullptr) const;
    /// Inverse in x_i of conditional_cdf; x_i itself is ignored.
    double conditional_quantile(int i, NodeSet D, double u, std::span<const double> x,
                                std::vector<std::string>* trace = nullptr) const;

    /// lambda(y) = r(1/y) prod y_j^-2.
    double exponent_measure_density(std::span<const double> y) const;
    /// Same quantity assembled from tree-1 degrees, bivariate exponent measure densities and
    /// pair copulas at the exponent-measure conditional distributions.
    double exponent_measure_density_degree_form(std::span<const double> y) const;

    /// Edge of tree |D| whose complete union is D u {i} and which conditions i; throws InvalidIndex.
    EdgePos conditional_edge(int i, NodeSet D) const;

    // Child links used by the recursion: index into the previous tree of the child holding
    // node a (resp. b) of the edge at p.
    int child_a(EdgePos p) const { return child_a_.at(p.level - 2).at(p.index); }
    int child_b(EdgePos p) const { return child_b_.at(p.level - 2).at(p.index); }

private:
    VineSequence vine_;
    std::map<EdgeKey, TailFamily> tails_;
    std::map<EdgeKey, PairFamily> pairs_;
    std::vector<TailFamily> tail_by_pos_;
    std::vector<std::vector<PairFamily>> pair_by_pos_;
    std::vector<std::vector<int>> child_a_, child_b_;
};

/// Memoised evaluation of the vine recursion at one point. Cached values stay valid while
/// coordinates are only added (as the sampler does), never changed.
class Evaluator {
public:
    explicit Evaluator(const XVineSpec& spec);

    void reset(std::span<const double> x);
    void set(int node, double value) { x_[node - 1] = value; }
    double coord(int node) const { return x_[node - 1]; }
    std::span<const double> point() const { return x_; }

    /// R_{node | A_e \ node} for the edge at p.
    double cdf(EdgePos p, int node);
    /// Inverse of cdf in x_node.
    double quantile(EdgePos p, int node, double u);
    double log_density();

    std::vector<std::string>* trace = nullptr;

private:
    const XVineSpec& spec_;
    std::vector<double> x_;
    std::vector<std::vector<double>> out_a_, out_b_;
};

/// Monte Carlo tail dependence coefficient from sample_conditional on the first node.
struct ChiEstimate {
    double value;
    double se;
};
/// nodes: two or three distinct labels.
ChiEstimate model_chi(const XVineSpec& spec, std::span<const int> nodes, std::size_t n_mc, std::uint64_t seed,
                      int threads = 1);

/// Quadrature oracle on a generic tail copula density of dimension d <= 4: margins,
/// conditional distributions and the conditional copula density c_{I;J}.
class QuadratureOracle {
public:
    using Density = std::function<double(std::span<const double>)>;
    QuadratureOracle(Density r, int d, double tol = 1e-10);

    /// r_S(x_S); x is a full d-vector, entries outside S ignored.
    double marginal(NodeSet S, std::span<const double> x) const;
    double conditional_density(int i, NodeSet J, std::span<const double> x) const;
    double conditional_cdf(int i, NodeSet J, std::span<const double> x) const;
    double conditional_quantile(int i, NodeSet J, double u, std::span<const double> x) const;
    /// c_{I;J} evaluated at the point x (x_{i1}, x_{i2} already on the quantile scale).
    double copula_density_at(int i1, int i2, NodeSet J, std::span<const double> x) const;
    /// c_{I;J}(u_1, u_2; x_J) for I = {i1, i2}.
    double copula_density(int i1, int i2, NodeSet J, double u1, double u2, std::span<const double> x) const;

private:
    Density r_;
    int d_;
    double tol_;
};

/// Conditional copula density of an X-vine by quadrature (test oracle, d <= 4).
double conditional_copula_density(const XVineSpec& spec, int i1, int i2, NodeSet J, double u1, double u2,
                                  std::span<const double> x);

}  // namespace xvine
