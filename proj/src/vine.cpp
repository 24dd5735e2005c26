#include "xvine/vine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "xvine/error.hpp"

namespace xvine {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

std::vector<int> parse_label_list(const std::string& s) {
    std::vector<int> out;
    if (s.find(',') != std::string::npos) {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            out.push_back(std::stoi(tok));
        }
    } else {
        for (char c : s) {
            if (c < '0' || c > '9') fail(ErrorKind::Parse, "bad edge label character in '" + s + "'");
            out.push_back(c - '0');
        }
    }
    return out;
}

}  // namespace

std::string EdgeKey::label() const {
    bool wide = std::max(b, cond.max()) > 9;
    std::string s = wide ? std::to_string(a) + "," + std::to_string(b) : std::to_string(a) + std::to_string(b);
    if (cond.empty()) return s;
    s += ';';
    if (!wide) return s + cond.str();
    std::string sep;
    for (int v : cond.to_vector()) {
        s += sep + std::to_string(v);
        sep = ",";
    }
    return s;
}

EdgeKey make_key(int x, int y, NodeSet cond) { return EdgeKey{std::min(x, y), std::max(x, y), cond}; }

EdgeKey parse_edge_label(const std::string& s) {
    auto semi = s.find(';');
    std::vector<int> ab = parse_label_list(s.substr(0, semi));
    std::vector<int> d = semi == std::string::npos ? std::vector<int>{} : parse_label_list(s.substr(semi + 1));
    if (ab.size() != 2) fail(ErrorKind::Parse, "edge label '" + s + "' needs two conditioned nodes");
    return make_key(ab[0], ab[1], NodeSet::of(d));
}

VineSequence VineSequence::from_pairs(NodeSet nodes, const std::vector<std::vector<std::pair<int, int>>>& trees) {
    const int d = nodes.size();
    if (d < 2) fail(ErrorKind::WrongCardinality, "a vine needs at least two nodes");
    if (trees.empty()) fail(ErrorKind::WrongCardinality, "no trees given");
    if (static_cast<int>(trees.size()) > d - 1)
        fail(ErrorKind::WrongCardinality, "more than d-1 trees for d=" + std::to_string(d));

    // Raw construction in the caller's order; endpoint ids are node labels on tree 1 and
    // previous-tree indices above.
    std::vector<std::vector<VineEdge>> raw(trees.size());
    for (std::size_t lv = 0; lv < trees.size(); ++lv) {
        const int j = static_cast<int>(lv) + 1;
        const auto& t = trees[lv];
        if (static_cast<int>(t.size()) != d - j)
            fail(ErrorKind::WrongCardinality, "tree " + std::to_string(j) + " has " + std::to_string(t.size()) +
                                                  " edges, expected " + std::to_string(d - j));
        if (j == 1) {
            UnionFind uf(NodeSet::kMaxNode + 1);
            for (auto [x, y] : t) {
                if (!nodes.contains(x) || !nodes.contains(y) || x == y)
                    fail(ErrorKind::NotATree, "tree 1 edge {" + std::to_string(x) + "," + std::to_string(y) +
                                                  "} is not between distinct vine nodes");
                if (!uf.unite(x, y))
                    fail(ErrorKind::NotATree, "tree 1 has a cycle through edge " + make_key(x, y).label());
                raw[0].push_back(VineEdge{make_key(x, y), -1, -1});
            }
            continue;
        }
        const auto& prev = raw[lv - 1];
        const int np = static_cast<int>(prev.size());
        UnionFind uf(np);
        for (auto [f, g] : t) {
            if (f < 0 || g < 0 || f >= np || g >= np || f == g)
                fail(ErrorKind::UnknownEdge, "tree " + std::to_string(j) + " refers to a missing tree " +
                                                 std::to_string(j - 1) + " edge");
            const EdgeKey& kf = prev[f].key;
            const EdgeKey& kg = prev[g].key;
            NodeSet af = kf.complete(), ag = kg.complete();
            // Shared endpoint count in T_{j-1}: node labels on tree 1, child indices above.
            int shared;
            if (j == 2) {
                shared = (kf.conditioned() & kg.conditioned()).size();
            } else {
                shared = 0;
                for (int x : {prev[f].left, prev[f].right})
                    if (x == prev[g].left || x == prev[g].right) ++shared;
            }
            if (shared != 1)
                fail(ErrorKind::ProximityViolation, "edges " + kf.label() + " and " + kg.label() +
                                                        " share " + std::to_string(shared) + " nodes in tree " +
                                                        std::to_string(j - 1));
            if (!uf.unite(f, g))
                fail(ErrorKind::NotATree, "tree " + std::to_string(j) + " has a cycle through " + kf.label() + "--" +
                                              kg.label());
            NodeSet D = af & ag;
            NodeSet C = (af | ag) - D;
            std::vector<int> c = C.to_vector();
            raw[lv].push_back(VineEdge{make_key(c.at(0), c.at(1), D), f, g});
        }
    }

    VineSequence v;
    v.nodes_ = nodes;
    v.trees_.resize(raw.size());
    std::vector<int> remap;
    for (std::size_t lv = 0; lv < raw.size(); ++lv) {
        auto& level = raw[lv];
        for (auto& e : level) {
            if (lv > 0) {
                e.left = remap[e.left];
                e.right = remap[e.right];
                if (e.left > e.right) std::swap(e.left, e.right);
            }
        }
        std::vector<int> order(level.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int x, int y) { return level[x].key < level[y].key; });
        remap.assign(level.size(), 0);
        for (std::size_t i = 0; i < order.size(); ++i) {
            remap[order[i]] = static_cast<int>(i);
            v.trees_[lv].push_back(level[order[i]]);
        }
    }
    v.by_complete_.resize(v.trees_.size());
    for (std::size_t lv = 0; lv < v.trees_.size(); ++lv) {
        for (std::size_t i = 0; i < v.trees_[lv].size(); ++i) {
            const EdgeKey& k = v.trees_[lv][i].key;
            if (!v.index_.emplace(k, EdgePos{static_cast<int>(lv) + 1, static_cast<int>(i)}).second ||
                !v.by_complete_[lv].emplace(k.complete(), static_cast<int>(i)).second)
                fail(ErrorKind::NotATree, "duplicate edge " + k.label());
        }
    }
    return v;
}

VineSequence VineSequence::from_edges(NodeSet nodes, const std::vector<std::vector<EdgeKey>>& trees) {
    std::vector<std::vector<std::pair<int, int>>> pairs(trees.size());
    std::vector<std::map<NodeSet, int>> complete(trees.size());
    for (std::size_t lv = 0; lv < trees.size(); ++lv) {
        const int j = static_cast<int>(lv) + 1;
        for (std::size_t i = 0; i < trees[lv].size(); ++i) {
            EdgeKey k = make_key(trees[lv][i].a, trees[lv][i].b, trees[lv][i].cond);
            if (k.cond.size() != j - 1 || k.cond.contains(k.a) || k.cond.contains(k.b) || k.a == k.b)
                fail(ErrorKind::WrongCardinality, "edge " + k.label() + " does not fit tree " + std::to_string(j));
            if (!k.complete().subset_of(nodes))
                fail(ErrorKind::NotATree, "edge " + k.label() + " uses nodes outside the vine");
            complete[lv][k.complete()] = static_cast<int>(i);
            if (j == 1) {
                pairs[lv].emplace_back(k.a, k.b);
                continue;
            }
            auto child = [&](int keep) {
                NodeSet A = k.cond;
                A.insert(keep);
                auto it = complete[lv - 1].find(A);
                if (it == complete[lv - 1].end())
                    fail(ErrorKind::ProximityViolation, "edge " + k.label() + " needs a tree " + std::to_string(j - 1) +
                                                            " edge with complete union {" + A.str() +
                                                            "}, which does not exist");
                return it->second;
            };
            pairs[lv].emplace_back(child(k.a), child(k.b));
        }
    }
    return from_pairs(nodes, pairs);
}

std::optional<EdgePos> VineSequence::find(const EdgeKey& k) const {
    auto it = index_.find(make_key(k.a, k.b, k.cond));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

EdgePos VineSequence::locate(const EdgeKey& k) const {
    auto p = find(k);
    if (!p) fail(ErrorKind::UnknownEdge, "edge " + make_key(k.a, k.b, k.cond).label() + " is not in the vine");
    return *p;
}

std::optional<int> VineSequence::by_complete(int level, NodeSet A) const {
    if (level < 1 || level > levels()) return std::nullopt;
    auto it = by_complete_[level - 1].find(A);
    if (it == by_complete_[level - 1].end()) return std::nullopt;
    return it->second;
}

std::vector<EdgeKey> VineSequence::keys() const {
    std::vector<EdgeKey> out;
    for (const auto& t : trees_)
        for (const auto& e : t) out.push_back(e.key);
    return out;
}

EdgeMetadata VineSequence::metadata(EdgePos p) const {
    const EdgeKey& k = edge(p).key;
    return {k.a, k.b, k.cond, k.complete()};
}

EdgeMetadata VineSequence::metadata(const EdgeKey& k) const { return metadata(locate(k)); }

VineSequence VineSequence::sub_vine(const EdgeKey& f) const {
    EdgePos p = locate(f);
    NodeSet A = edge(p).key.complete();
    std::vector<std::vector<EdgeKey>> keys(p.level);
    for (int lv = 1; lv <= p.level; ++lv)
        for (const auto& e : tree(lv))
            if (e.key.complete().subset_of(A)) keys[lv - 1].push_back(e.key);
    return from_edges(A, keys);
}

VineSequence VineSequence::truncate(int q) const {
    if (q < 1) fail(ErrorKind::DomainError, "truncation level must be >= 1");
    if (q >= levels()) return *this;
    std::vector<std::vector<EdgeKey>> keys(q);
    for (int lv = 1; lv <= q; ++lv)
        for (const auto& e : tree(lv)) keys[lv - 1].push_back(e.key);
    return from_edges(nodes_, keys);
}

bool operator==(const VineSequence& x, const VineSequence& y) {
    if (x.nodes_ != y.nodes_ || x.trees_.size() != y.trees_.size()) return false;
    for (std::size_t lv = 0; lv < x.trees_.size(); ++lv) {
        if (x.trees_[lv].size() != y.trees_[lv].size()) return false;
        for (std::size_t i = 0; i < x.trees_[lv].size(); ++i)
            if (!(x.trees_[lv][i].key == y.trees_[lv][i].key)) return false;
    }
    return true;
}

double telescoping_product(const VineSequence& v, const std::function<double(NodeSet)>& gamma) {
    auto g = [&](NodeSet s) {
        if (s.size() == 1) return 1.0;
        double x = gamma(s);
        if (!(x > 0.0)) fail(ErrorKind::NonpositiveValue, "gamma{" + s.str() + "} is not positive");
        return x;
    };
    double prod = 1.0;
    for (const auto& e : v.tree(1)) prod *= g(e.key.complete());
    for (int lv = 2; lv <= v.levels(); ++lv) {
        auto prev = v.tree(lv - 1);
        for (const auto& e : v.tree(lv)) {
            prod *= g(e.key.cond) * g(e.key.complete()) /
                    (g(prev[e.left].key.complete()) * g(prev[e.right].key.complete()));
        }
    }
    return prod;
}

double telescoping_product(const VineSequence& v, const std::map<NodeSet, double>& gamma) {
    return telescoping_product(v, [&](NodeSet s) {
        auto it = gamma.find(s);
        if (it == gamma.end()) fail(ErrorKind::MissingSubset, "gamma{" + s.str() + "} missing");
        return it->second;
    });
}

// ---------------------------------------------------------------------------------------------
// Structure matrices

std::vector<int> StructureMatrix::diagonal() const {
    std::vector<int> out(d);
    for (int i = 1; i <= d; ++i) out[i - 1] = at(i, i);
    return out;
}

namespace {

struct Encoder {
    const VineSequence& v;
    int q;
    std::optional<int> first;
    std::span<const int> diag;  // empty when free
    std::vector<std::vector<bool>> alive;
    StructureMatrix out;

    bool place(int k, NodeSet S) {
        if (k == 1) {
            int x = S.min();
            if (first && x != *first) return false;
            if (!diag.empty() && x != diag[0]) return false;
            out.at(1, 1) = x;
            return true;
        }
        const int L = std::min(q, k - 1);
        std::vector<int> cand;
        if (!diag.empty()) {
            if (S.contains(diag[k - 1])) cand.push_back(diag[k - 1]);
        } else {
            for (int x : S.to_vector())
                if (!first || x != *first) cand.push_back(x);
        }
        for (int x : cand) {
            std::vector<int> picked;  // edge index per level
            bool ok = true;
            for (int lv = 1; lv <= q && ok; ++lv) {
                auto t = v.tree(lv);
                int hits = 0, at = -1;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    if (!alive[lv - 1][i]) continue;
                    if (t[i].key.cond.contains(x)) ok = false;
                    if (t[i].key.a == x || t[i].key.b == x) {
                        ++hits;
                        at = static_cast<int>(i);
                    }
                }
                if (lv <= L) {
                    if (hits != 1) ok = false;
                    picked.push_back(at);
                } else if (hits != 0) {
                    ok = false;
                }
            }
            if (!ok) continue;
            // The column must be consistent: row t conditions on rows 1..t-1.
            NodeSet above;
            for (int lv = 1; lv <= L && ok; ++lv) {
                const EdgeKey& e = v.tree(lv)[picked[lv - 1]].key;
                if (e.cond != above) ok = false;
                int partner = e.a == x ? e.b : e.a;
                above.insert(partner);
            }
            if (!ok) continue;
            for (int lv = 1; lv <= L; ++lv) {
                const EdgeKey& e = v.tree(lv)[picked[lv - 1]].key;
                out.at(lv, k) = e.a == x ? e.b : e.a;
                alive[lv - 1][picked[lv - 1]] = false;
            }
            out.at(k, k) = x;
            if (place(k - 1, S - NodeSet{x})) return true;
            for (int lv = 1; lv <= L; ++lv) {
                alive[lv - 1][picked[lv - 1]] = true;
                out.at(lv, k) = 0;
            }
        }
        return false;
    }
};

StructureMatrix encode(const VineSequence& v, std::optional<int> first, std::span<const int> diag) {
    const int d = v.dim();
    if (v.nodes() != NodeSet::range(d))
        fail(ErrorKind::MalformedMatrix, "structure matrices need nodes labelled 1..d");
    Encoder enc{v, v.levels(), first, diag, {}, {}};
    enc.out.d = d;
    enc.out.trunc = v.levels();
    enc.out.m.assign(static_cast<std::size_t>(d) * d, 0);
    for (int lv = 1; lv <= v.levels(); ++lv) enc.alive.emplace_back(v.tree(lv).size(), true);
    if (!enc.place(d, v.nodes())) {
        std::string what = first ? "m(1,1)=" + std::to_string(*first) : std::string("the requested diagonal");
        fail(ErrorKind::InfeasibleDiagonal, what + " cannot be realised for this vine");
    }
    return enc.out;
}

}  // namespace

StructureMatrix to_structure_matrix(const VineSequence& v, std::optional<int> first_diag) {
    if (first_diag && !v.nodes().contains(*first_diag))
        fail(ErrorKind::InfeasibleDiagonal, "node " + std::to_string(*first_diag) + " is not in the vine");
    if (first_diag) return encode(v, first_diag, {});
    // Smallest node that can head the diagonal.
    for (int j : v.nodes().to_vector()) {
        try {
            return encode(v, j, {});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InfeasibleDiagonal) throw;
        }
    }
    return encode(v, std::nullopt, {});
}

StructureMatrix to_structure_matrix(const VineSequence& v, std::span<const int> diagonal) {
    if (static_cast<int>(diagonal.size()) != v.dim() ||
        NodeSet::of(std::vector<int>(diagonal.begin(), diagonal.end())) != v.nodes())
        fail(ErrorKind::InfeasibleDiagonal, "diagonal is not a permutation of the vine nodes");
    return encode(v, std::nullopt, diagonal);
}

void check_structure_matrix(const StructureMatrix& m) {
    const int d = m.d;
    if (d < 2 || d > NodeSet::kMaxNode) fail(ErrorKind::MalformedMatrix, "dimension out of range");
    if (static_cast<int>(m.m.size()) != d * d) fail(ErrorKind::MalformedMatrix, "matrix is not d x d");
    if (m.trunc < 1 || m.trunc > d - 1) fail(ErrorKind::MalformedMatrix, "trunc must lie in 1..d-1");
    NodeSet diag;
    for (int i = 1; i <= d; ++i) {
        int x = m.at(i, i);
        if (x < 1 || x > d || diag.contains(x)) fail(ErrorKind::MalformedMatrix, "diagonal is not a permutation of 1..d");
        diag.insert(x);
    }
    for (int i = 1; i <= d; ++i) {
        for (int j = 1; j <= d; ++j) {
            int x = m.at(i, j);
            if (i > j && x != 0) fail(ErrorKind::MalformedMatrix, "non-zero entry below the diagonal");
            if (i < j) {
                bool want = i <= m.trunc;
                if (want && (x < 1 || x > d))
                    fail(ErrorKind::MalformedMatrix, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                         ") must be a node label");
                if (!want && x != 0)
                    fail(ErrorKind::MalformedMatrix, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                         ") lies in a truncated row and must be 0");
            }
        }
    }
}

VineSequence from_structure_matrix(const StructureMatrix& m) {
    check_structure_matrix(m);
    std::vector<std::vector<EdgeKey>> trees(m.trunc);
    for (int k = 2; k <= m.d; ++k) {
        NodeSet above;
        for (int t = 1; t <= std::min(m.trunc, k - 1); ++t) {
            int x = m.at(k, k), y = m.at(t, k);
            if (x == y || above.contains(y))
                fail(ErrorKind::MalformedMatrix, "column " + std::to_string(k) + " repeats node " + std::to_string(y));
            trees[t - 1].push_back(make_key(x, y, above));
            above.insert(y);
        }
    }
    try {
        return VineSequence::from_edges(m.d, trees);
    } catch (const Error& e) {
        fail(ErrorKind::MalformedMatrix, e.what());
    }
}

SamplingOrder sampling_order_from_permutation(const VineSequence& v, std::span<const int> sigma) {
    if (v.truncated())
        fail(ErrorKind::TruncatedVine, "sampling orders need an untruncated vine");
    StructureMatrix m = to_structure_matrix(v, sigma);
    SamplingOrder s;
    s.sigma = m.diagonal();
    s.pivot = s.sigma[0];
    for (int k = 2; k <= m.d; ++k) {
        NodeSet above;
        for (int t = 1; t <= k - 2; ++t) above.insert(m.at(t, k));
        s.edges.push_back(make_key(m.at(k, k), m.at(k - 1, k), above));
    }
    return s;
}

SamplingOrder sampling_order(const VineSequence& v, int j) {
    if (v.truncated())
        fail(ErrorKind::TruncatedVine, "sampling orders need an untruncated vine");
    StructureMatrix m = to_structure_matrix(v, j);
    std::vector<int> sigma = m.diagonal();
    return sampling_order_from_permutation(v, sigma);
}

bool is_valid_sampling_order(const VineSequence& v, const SamplingOrder& s) {
    const int d = v.dim();
    if (static_cast<int>(s.sigma.size()) != d || s.sigma.empty() || s.sigma[0] != s.pivot) return false;
    if (NodeSet::of(s.sigma) != v.nodes()) return false;
    if (static_cast<int>(s.edges.size()) != d - 1) return false;
    NodeSet prefix{s.sigma[0]};
    for (int k = 2; k <= d; ++k) {
        const EdgeKey& e = s.edges[k - 2];
        auto p = v.find(e);
        if (!p || p->level != k - 1) return false;
        prefix.insert(s.sigma[k - 1]);
        if (!e.conditioned().contains(s.sigma[k - 1]) || e.complete() != prefix) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------------------------
// Generators

namespace {

// Wilson's algorithm: uniform spanning tree of a connected graph given by adjacency lists.
std::vector<std::pair<int, int>> uniform_spanning_tree(const std::vector<std::vector<int>>& adj, Rng& rng) {
    const int n = static_cast<int>(adj.size());
    std::vector<bool> in_tree(n, false);
    std::vector<int> next(n, -1);
    in_tree[rng.below(n)] = true;
    for (int i = 0; i < n; ++i) {
        int u = i;
        while (!in_tree[u]) {
            if (adj[u].empty()) fail(ErrorKind::InfeasibleLevel, "candidate graph is disconnected");
            next[u] = adj[u][rng.below(adj[u].size())];
            u = next[u];
        }
        u = i;
        while (!in_tree[u]) {
            in_tree[u] = true;
            u = next[u];
        }
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        if (next[i] >= 0) edges.emplace_back(i, next[i]);
    // Roots never get a successor; every other node contributes exactly one edge.
    return edges;
}

}  // namespace

VineSequence random_vine(int d, Rng& rng, int trunc) {
    if (d < 2 || d > NodeSet::kMaxNode) fail(ErrorKind::DomainError, "random_vine needs 2 <= d <= 64");
    if (trunc < 0 || trunc > d - 1) trunc = d - 1;
    std::vector<std::vector<std::pair<int, int>>> trees;
    std::vector<std::vector<int>> adj(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) adj[i].push_back(j);
    std::vector<std::pair<int, int>> t1;
    for (auto [x, y] : uniform_spanning_tree(adj, rng)) t1.emplace_back(x + 1, y + 1);
    trees.push_back(t1);
    // Endpoints of the current tree's edges, as sets of ids in the tree below.
    std::vector<std::pair<int, int>> ends = t1;
    for (int lv = 2; lv <= trunc; ++lv) {
        const int n = static_cast<int>(ends.size());
        std::vector<std::vector<int>> cand(n);
        for (int f = 0; f < n; ++f)
            for (int g = 0; g < n; ++g) {
                if (f == g) continue;
                int shared = 0;
                for (int x : {ends[f].first, ends[f].second})
                    if (x == ends[g].first || x == ends[g].second) ++shared;
                if (shared == 1) cand[f].push_back(g);
            }
        auto t = uniform_spanning_tree(cand, rng);
        trees.push_back(t);
        ends = t;
    }
    return VineSequence::from_pairs(d, trees);
}

VineSequence d_vine(int d, int trunc) {
    if (trunc < 0 || trunc > d - 1) trunc = d - 1;
    std::vector<std::vector<EdgeKey>> trees(trunc);
    for (int t = 1; t <= trunc; ++t)
        for (int i = 1; i + t <= d; ++i) {
            NodeSet D;
            for (int x = i + 1; x < i + t; ++x) D.insert(x);
            trees[t - 1].push_back(make_key(i, i + t, D));
        }
    return VineSequence::from_edges(d, trees);
}

VineSequence c_vine(int d, int trunc) {
    if (trunc < 0 || trunc > d - 1) trunc = d - 1;
    std::vector<std::vector<EdgeKey>> trees(trunc);
    for (int t = 1; t <= trunc; ++t)
        for (int i = t + 1; i <= d; ++i) trees[t - 1].push_back(make_key(t, i, NodeSet::range(t - 1)));
    return VineSequence::from_edges(d, trees);
}

}  // namespace xvine
