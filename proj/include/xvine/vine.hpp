#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xvine/node_set.hpp"
#include "xvine/rng.hpp"

namespace xvine {

/// Canonical edge identity (a, b; D) with a < b.
struct EdgeKey {
    int a = 0;
    int b = 0;
    NodeSet cond;

    NodeSet conditioned() const { return NodeSet{a, b}; }
    NodeSet complete() const { return cond | conditioned(); }
    int level() const { return cond.size() + 1; }
    /// "12", "14;23"; with labels above 9: "3,12;4,5".
    std::string label() const;

    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
    friend auto operator<=>(const EdgeKey& x, const EdgeKey& y) {
        if (auto c = x.cond.size() <=> y.cond.size(); c != 0) return c;
        if (auto c = x.a <=> y.a; c != 0) return c;
        if (auto c = x.b <=> y.b; c != 0) return c;
        return x.cond <=> y.cond;
    }
};

EdgeKey make_key(int x, int y, NodeSet cond = {});
/// Parses "14;23", "1,12;3,4" or "12".
EdgeKey parse_edge_label(const std::string& s);

struct VineEdge {
    EdgeKey key;
    /// Endpoints in the previous tree (indices into tree level-1); -1 on the first tree.
    int left = -1;
    int right = -1;
};

struct EdgePos {
    int level = 0;  ///< 1-based tree index
    int index = 0;  ///< position inside the tree
    friend bool operator==(const EdgePos&, const EdgePos&) = default;
};

struct EdgeMetadata {
    int a;
    int b;
    NodeSet cond;
    NodeSet complete;
};

/// Validated, possibly truncated regular vine sequence. Edges in every tree are kept sorted
/// by key, so two vines are equal iff their per-tree key sets are equal.
class VineSequence {
public:
    /// Tree 1 as node-label pairs, tree j >= 2 as 0-based index pairs into tree j-1 as given.
    static VineSequence from_pairs(NodeSet nodes, const std::vector<std::vector<std::pair<int, int>>>& trees);
    static VineSequence from_pairs(int d, const std::vector<std::vector<std::pair<int, int>>>& trees) {
        return from_pairs(NodeSet::range(d), trees);
    }
    /// Trees given by canonical keys; endpoints are found through complete unions.
    static VineSequence from_edges(NodeSet nodes, const std::vector<std::vector<EdgeKey>>& trees);
    static VineSequence from_edges(int d, const std::vector<std::vector<EdgeKey>>& trees) {
        return from_edges(NodeSet::range(d), trees);
    }

    int dim() const { return nodes_.size(); }
    NodeSet nodes() const { return nodes_; }
    /// Number of stored trees q.
    int levels() const { return static_cast<int>(trees_.size()); }
    bool truncated() const { return levels() < dim() - 1; }

    std::span<const VineEdge> tree(int level) const { return trees_.at(level - 1); }
    const VineEdge& edge(EdgePos p) const { return trees_.at(p.level - 1).at(p.index); }
    std::optional<EdgePos> find(const EdgeKey& k) const;
    EdgePos locate(const EdgeKey& k) const;  ///< throws UnknownEdge
    /// Edge of the given tree whose complete union is A.
    std::optional<int> by_complete(int level, NodeSet A) const;
    std::vector<EdgeKey> keys() const;

    EdgeMetadata metadata(const EdgeKey& k) const;
    EdgeMetadata metadata(EdgePos p) const;

    VineSequence sub_vine(const EdgeKey& f) const;
    VineSequence truncate(int q) const;

    friend bool operator==(const VineSequence& x, const VineSequence& y);

private:
    NodeSet nodes_;
    std::vector<std::vector<VineEdge>> trees_;
    std::map<EdgeKey, EdgePos> index_;
    std::vector<std::map<NodeSet, int>> by_complete_;
};

/// Right-hand side of the vine telescoping identity. gamma must hold every pair, every A_e,
/// D_e and child complete union; singletons default to 1. Truncated vines use their stored
/// trees only, giving gamma of the complete union of the top edges' product form.
double telescoping_product(const VineSequence& v, const std::map<NodeSet, double>& gamma);
double telescoping_product(const VineSequence& v, const std::function<double(NodeSet)>& gamma);

/// Upper-triangular structure matrix, entries 1-based labels, 0 in truncated positions.
struct StructureMatrix {
    int d = 0;
    int trunc = 0;
    std::vector<int> m;  ///< row-major d x d

    int& at(int i, int j) { return m[(i - 1) * d + (j - 1)]; }
    int at(int i, int j) const { return m[(i - 1) * d + (j - 1)]; }
    std::vector<int> diagonal() const;
    friend bool operator==(const StructureMatrix&, const StructureMatrix&) = default;
};

/// Encodes v with m(1,1) = first_diag, or the smallest node that admits one. Other free choices
/// take the smallest eligible node.
StructureMatrix to_structure_matrix(const VineSequence& v, std::optional<int> first_diag = std::nullopt);
/// Encodes v with the full diagonal prescribed (top-down); throws InfeasibleDiagonal.
StructureMatrix to_structure_matrix(const VineSequence& v, std::span<const int> diagonal);
VineSequence from_structure_matrix(const StructureMatrix& m);
/// Checks shape, diagonal and zero pattern; throws MalformedMatrix.
void check_structure_matrix(const StructureMatrix& m);

struct SamplingOrder {
    int pivot = 0;
    std::vector<int> sigma;
    std::vector<EdgeKey> edges;  ///< edges[k-2] in tree k-1 has A = {sigma_1..sigma_k}
};

SamplingOrder sampling_order(const VineSequence& v, int j);
SamplingOrder sampling_order_from_permutation(const VineSequence& v, std::span<const int> sigma);
/// Direct check of the sampling-order conditions.
bool is_valid_sampling_order(const VineSequence& v, const SamplingOrder& s);

/// Random vine on {1..d}: uniform spanning tree for T_1, then uniform proximity-respecting
/// spanning trees (Wilson's algorithm) up to level `trunc` (default d-1).
VineSequence random_vine(int d, Rng& rng, int trunc = -1);

/// D-vine (path 1-2-...-d) and C-vine (star at 1, then 2, ...) helpers.
VineSequence d_vine(int d, int trunc = -1);
VineSequence c_vine(int d, int trunc = -1);

}  // namespace xvine
