#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xvine/families.hpp"
#include "xvine/matrix.hpp"
#include "xvine/model.hpp"
#include "xvine/vine.hpp"

namespace xvine {

/// Margin-standardised sample with the exceedance index sets K_j.
struct PseudoSample {
    std::size_t n = 0;
    int d = 0;
    double k = 0.0;
    bool from_ranks = true;
    Matrix u_hat;  ///< empty for inverted-Pareto input
    Matrix z_hat;
    std::vector<std::vector<std::size_t>> exceed;  ///< K_j, j = 1..d (index j-1)
    std::vector<std::uint64_t> mask;               ///< bit j-1 set iff row in K_j

    /// K_D: rows exceeding in every node of D (all rows for empty D).
    std::vector<std::size_t> rows_all(NodeSet D) const;
    /// Rows exceeding in at least one node of S.
    std::vector<std::size_t> rows_any(NodeSet S) const;
};

/// U = 1 - (rank - 0.5)/n with maximal ranks, Z = (n/k) U, K_j = {U_j < k/n}.
PseudoSample rank_transform(const Matrix& X, std::size_t k);
/// Inverted-Pareto samples used as they are: Z = data, K_j = {Z_j < 1}.
PseudoSample from_inverted_pareto(const Matrix& Z);

/// Empirical tail dependence coefficient of two or three nodes: joint exceedances over k for
/// rank input, over the mean exceedance count of the nodes for inverted-Pareto input.
double empirical_chi(const PseudoSample& ps, std::span<const int> nodes);
/// Kendall's tau-b in O(n log n).
double kendall_tau(std::span<const double> x, std::span<const double> y);

enum class AicConvention { Paper, Standard };

struct TailFit {
    TailFamily family;  ///< theta = average of the two subsample estimates
    double theta_a = 0, theta_b = 0;
    double loglik_a = 0, loglik_b = 0;
    std::size_t n_a = 0, n_b = 0;
    bool boundary = false;
    double aic = 0;
};

/// Maximises the tail copula pseudo-likelihood separately on K_a and K_b and averages.
TailFit fit_tail_edge(const PseudoSample& ps, int a, int b, TailKind kind, AicConvention conv = AicConvention::Paper);

struct PairFit {
    PairFamily family;
    double loglik = 0;
    double aic = 0;
    std::size_t n = 0;
    bool boundary = false;
};

PairFit fit_pair_edge(std::span<const double> u, std::span<const double> v, PairKind kind);

struct TailSelection {
    TailFit best;
    std::vector<TailFit> table;
};
TailSelection select_tail_family(const PseudoSample& ps, int a, int b, std::span<const TailKind> catalogue,
                                 AicConvention conv = AicConvention::Paper);

struct SelectionRules {
    double tau_min = 0.05;
    std::size_t n_min = 10;
};

struct PairSelection {
    PairFit best;
    std::vector<PairFit> table;
    double tau = 0;
    bool forced = false;  ///< independence imposed by a forcing rule
};
PairSelection select_pair_family(std::span<const double> u, std::span<const double> v,
                                 std::span<const PairKind> catalogue, SelectionRules rules = {});

struct WeightedEdge {
    int u, v;  ///< node ids in [0, n)
    double w;
    EdgeKey key;  ///< tie-break: lexicographically smaller key wins
};
/// Kruskal on descending weight; returns indices into `edges`.
std::vector<std::size_t> maximum_spanning_tree(int n, std::vector<WeightedEdge> edges);

/// Maximum spanning tree on chi-hat weights.
std::vector<std::pair<int, int>> learn_tree1(const PseudoSample& ps);

/// Pseudo-observations for a (possibly candidate) edge e of tree j from a model fitted up to
/// tree j-1, restricted to rows K_{D_e}.
struct PairData {
    std::vector<std::size_t> rows;
    std::vector<double> u, v;
};
PairData pseudo_obs_next_tree(const PseudoSample& ps, const XVineSpec& fitted, const EdgeKey& e);

/// Tree j as index pairs into tree j-1 of `fitted`: maximum spanning tree over
/// proximity-feasible pairs weighted by |tau-hat|.
std::vector<std::pair<int, int>> learn_tree_j(const PseudoSample& ps, const XVineSpec& fitted, int threads = 1);

enum class TruncationMode { Fixed, Mbic, Auto };

struct FitOptions {
    std::optional<VineSequence> structure;
    /// Known families: the edge is fitted within this family only and no forcing rule applies.
    std::map<EdgeKey, TailKind> fixed_tail;
    std::map<EdgeKey, PairKind> fixed_pair;
    std::vector<TailKind> tail_catalogue = all_tail_kinds();
    std::vector<PairKind> pair_catalogue = all_pair_kinds();
    TruncationMode trunc_mode = TruncationMode::Auto;
    int trunc_q = 0;  ///< for Fixed
    double psi0 = 0.9;
    AicConvention aic = AicConvention::Paper;
    SelectionRules rules;
    int threads = 1;
};

struct EdgeReport {
    EdgeKey key;
    std::string family;
    double theta = 0;
    double loglik = 0;  ///< tree 1: mean of the two subsample log-likelihoods
    double loglik_a = 0, loglik_b = 0;
    double aic = 0;
    std::size_t n_eff = 0;
    std::vector<std::string> selected_over;
    bool boundary = false;
    bool forced = false;
    double tau_hat = 0;  ///< pair edges only
    std::string error;   ///< non-empty when the edge could not be fitted
};

struct FitReport {
    VineSequence vine;  ///< learned or given vine, truncated to the reported level
    std::vector<EdgeReport> edges;
    std::vector<double> mbic;  ///< mbic[q-1] = mBIC(q) over the fitted levels
    int q_star = 1;
    std::vector<std::string> errors;

    bool complete() const { return errors.empty(); }
    /// Model built from the reported edges; throws InvalidSpec when an edge is unfitted.
    XVineSpec model() const;
    const EdgeReport& edge(const EdgeKey& k) const;
};

/// mBIC(q) for q = 1..Q from the pair-copula edges of a report (mBIC(1) = 0).
std::vector<double> mbic_curve(const std::vector<EdgeReport>& edges, int Q, double psi0);
int optimal_truncation(const std::vector<double>& curve);

FitReport fit_pipeline(const PseudoSample& ps, const FitOptions& opts = {});

}  // namespace xvine
