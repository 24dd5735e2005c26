#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xvine/matrix.hpp"
#include "xvine/model.hpp"

namespace xvine {

/// Order in which coordinates are drawn given Z_pivot < 1: node order[k] is drawn from
/// R^{-1}_{order[k] | cond[k]}, with cond[k] the structure-matrix column above it.
struct ConditionalPlan {
    int pivot = 0;
    std::vector<int> order;
    std::vector<NodeSet> cond;
    std::vector<EdgePos> edges;
};

ConditionalPlan plan_conditional(const XVineSpec& spec, int j);

/// One draw of (Z | Z_j < 1) from uniforms w (indexed by node label - 1).
std::vector<double> conditional_draw(const XVineSpec& spec, const ConditionalPlan& plan, std::span<const double> w,
                                     std::vector<std::string>* trace = nullptr);

/// Rows distributed as (Z | Z_j < 1); Z_j is uniform on (0,1).
Matrix sample_conditional(const XVineSpec& spec, int j, std::size_t n, std::uint64_t seed, int threads = 1);

struct SampleResult {
    Matrix z;
    std::size_t proposals = 0;
    double acceptance_rate() const { return proposals ? static_cast<double>(z.rows) / proposals : 0.0; }
};

/// Inverted multivariate Pareto sample: a pivot i uniform on {1..d}, a draw of (Z | Z_i < 1),
/// accepted with probability 1/#{j : Z_j < 1}. The accepted law is proportional to r on
/// {min z < 1}.
SampleResult sample_inverted_pareto(const XVineSpec& spec, std::size_t n, std::uint64_t seed, int threads = 1);

/// Componentwise reciprocal of sample_inverted_pareto.
SampleResult sample_pareto(const XVineSpec& spec, std::size_t n, std::uint64_t seed, int threads = 1);

inline constexpr std::size_t kSampleBlock = 1024;

}  // namespace xvine
