#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "xvine/error.hpp"
#include "xvine/model.hpp"
#include "xvine/numerics.hpp"

using namespace xvine;

namespace {

// D-vine 1-2-3 whose density is the trivariate HR density of the variogram below.
const double kG12 = 1.5, kG23 = 1.0, kG13 = 2.0;

Eigen::MatrixXd variogram() {
    Eigen::MatrixXd G(3, 3);
    G << 0, kG12, kG13, kG12, 0, kG23, kG13, kG23, 0;
    return G;
}

XVineSpec hr3_spec() {
    double s13 = 0.5 * (kG12 + kG23 - kG13);  // Sigma^(2)_{13}
    double rho = s13 / std::sqrt(kG12 * kG23);
    return XVineSpec(d_vine(3),
                     {{make_key(1, 2), {TailKind::HuslerReiss, kG12}}, {make_key(2, 3), {TailKind::HuslerReiss, kG23}}},
                     {{make_key(1, 3, {2}), {PairKind::Gaussian, rho}}});
}

std::vector<double> random_point(Rng& rng, int d) {
    std::vector<double> x(d);
    for (auto& v : x) v = std::exp(3.0 * rng.uniform() - 1.5);
    return x;
}

}  // namespace

TEST_CASE("spec construction checks coverage") {
    auto tails = std::map<EdgeKey, TailFamily>{{make_key(1, 2), {TailKind::HuslerReiss, 1.0}}};
    CHECK_THROWS_AS(XVineSpec(d_vine(3, 1), tails, {}), Error);
    tails[make_key(2, 3)] = {TailKind::Logistic, 2.0};
    XVineSpec ok(d_vine(3, 1), tails, {});
    CHECK(ok.levels() == 1);
    CHECK_THROWS_AS(XVineSpec(d_vine(3, 1), tails, {{make_key(1, 3, {2}), {PairKind::Clayton, 1.0}}}), Error);
    tails[make_key(2, 3)] = {TailKind::Logistic, 0.5};
    CHECK_THROWS_AS(XVineSpec(d_vine(3, 1), tails, {}), Error);
}

TEST_CASE("Markov tree density is the product of tail densities") {
    TailFamily f{TailKind::HuslerReiss, 1.0};
    XVineSpec s(d_vine(3, 1), {{make_key(1, 2), f}, {make_key(2, 3), f}}, {});
    std::vector<double> one{1, 1, 1};
    CHECK(s.density(one) == doctest::Approx(tail_density(f, 1, 1) * tail_density(f, 1, 1)).epsilon(1e-14));
    std::vector<double> bad{1, -1, 1};
    CHECK(s.density(bad) == 0.0);
    CHECK(std::isinf(s.log_density(bad)));
}

TEST_CASE("homogeneity of the five-dimensional density") {
    XVineSpec s = oracle::fig2_spec();
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        auto x = random_point(rng, 5);
        std::vector<double> sx = x;
        for (auto& v : sx) v *= 2.5;
        REQUIRE(s.log_density(sx) == doctest::Approx(s.log_density(x) - 4.0 * std::log(2.5)).epsilon(1e-12));
    }
}

TEST_CASE("density equals the expanded product on the worked vine") {
    XVineSpec s = oracle::fig2_spec();
    auto T = [&](int a, int b) { return s.tail(make_key(a, b)); };
    auto C = [&](int a, int b, NodeSet D) { return s.pair(make_key(a, b, D)); };
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        auto x = random_point(rng, 5);
        auto X = [&](int j) { return x[j - 1]; };
        double r12 = tail_h(T(1, 2), X(1), X(2)), r32 = tail_h(T(2, 3), X(3), X(2)), r42 = tail_h(T(2, 4), X(4), X(2));
        double r24 = tail_h(T(2, 4), X(2), X(4)), r54 = tail_h(T(4, 5), X(5), X(4));
        double r1_23 = pair_h(C(1, 3, {2}), r12, r32);
        double r4_23 = pair_h(C(3, 4, {2}), r42, r32);
        double r3_24 = pair_h(C(3, 4, {2}), r32, r42);
        double r5_24 = pair_h(C(2, 5, {4}), r54, r24);
        double r1_234 = pair_h(C(1, 4, {2, 3}), r1_23, r4_23);
        double r5_234 = pair_h(C(3, 5, {2, 4}), r5_24, r3_24);
        double prod = tail_density(T(1, 2), X(1), X(2)) * tail_density(T(2, 3), X(2), X(3)) *
                      tail_density(T(2, 4), X(2), X(4)) * tail_density(T(4, 5), X(4), X(5)) *
                      pair_density(C(1, 3, {2}), r12, r32) * pair_density(C(3, 4, {2}), r32, r42) *
                      pair_density(C(2, 5, {4}), r24, r54) * pair_density(C(1, 4, {2, 3}), r1_23, r4_23) *
                      pair_density(C(3, 5, {2, 4}), r3_24, r5_24) * pair_density(C(1, 5, {2, 3, 4}), r1_234, r5_234);
        REQUIRE(s.density(x) == doctest::Approx(prod).epsilon(1e-12));
        REQUIRE(s.conditional_cdf(1, {2, 3, 4}, x) == doctest::Approx(r1_234).epsilon(1e-13));
        REQUIRE(s.conditional_cdf(1, {2, 3}, x) == doctest::Approx(r1_23).epsilon(1e-13));
    }
}

TEST_CASE("converse Sklar assembly at d = 3") {
    XVineSpec s(d_vine(3),
                {{make_key(1, 2), {TailKind::NegLogistic, 1.3}}, {make_key(2, 3), {TailKind::Dirichlet, 0.8}}},
                {{make_key(1, 3, {2}), {PairKind::Frank, 4.0}}});
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        auto x = random_point(rng, 3);
        TailFamily r12{TailKind::NegLogistic, 1.3}, r23{TailKind::Dirichlet, 0.8};
        double v = tail_density(r12, x[0], x[1]) * tail_density(r23, x[1], x[2]) *
                   pair_density({PairKind::Frank, 4.0}, tail_h(r12, x[0], x[1]), tail_h(r23, x[2], x[1]));
        REQUIRE(s.density(x) == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("Husler-Reiss X-vine reproduces the trivariate HR density") {
    XVineSpec s = hr3_spec();
    Eigen::MatrixXd G = variogram();
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        auto x = random_point(rng, 3);
        REQUIRE(s.density(x) == doctest::Approx(oracle::hr_density(G, x)).epsilon(1e-10));
    }
}

TEST_CASE("marginal normalisation by nested quadrature") {
    auto mass = [](const XVineSpec& s) {
        return quad_1d(
            [&](double x1) {
                return quad_1d(
                    [&](double x3) {
                        std::vector<double> x{x1, 1.0, x3};
                        return s.density(x);
                    },
                    0.0, kQuadUpper, 1e-9);
            },
            0.0, kQuadUpper, 1e-7);
    };
    XVineSpec s(d_vine(3),
                {{make_key(1, 2), {TailKind::HuslerReiss, 1.0}}, {make_key(2, 3), {TailKind::Logistic, 2.0}}},
                {{make_key(1, 3, {2}), {PairKind::Gaussian, 0.5}}});
    CHECK(std::fabs(mass(s) - 1.0) < 1e-3);

    // Random specs over the catalogues.
    Rng rng(21);
    auto tk = all_tail_kinds();
    auto pk = all_pair_kinds();
    for (int rep = 0; rep < 5; ++rep) {
        auto tail = [&] {
            TailKind k = tk[rng.below(tk.size())];
            return TailFamily{k, k == TailKind::Logistic ? 1.2 + 3 * rng.uniform() : 0.3 + 3 * rng.uniform()};
        };
        PairKind k = pk[rng.below(pk.size())];
        PairFamily c{k, pair_tau_inverse(k == PairKind::Independence ? PairKind::Gaussian : k, 0.1 + 0.5 * rng.uniform())};
        if (k == PairKind::Independence) c.theta = 0.0;
        XVineSpec r(d_vine(3), {{make_key(1, 2), tail()}, {make_key(2, 3), tail()}}, {{make_key(1, 3, {2}), c}});
        INFO(to_string(r.tail(make_key(1, 2)).kind) << " " << to_string(r.tail(make_key(2, 3)).kind) << " "
                                                     << to_string(c.kind) << " " << c.theta);
        CHECK(std::fabs(mass(r) - 1.0) < 1e-3);
    }
}

TEST_CASE("conditional distributions") {
    XVineSpec s = oracle::fig2_spec();
    std::vector<double> x{0.7, 1.2, 0.4, 2.0, 0.9};
    CHECK(s.conditional_cdf(1, {2}, x) == doctest::Approx(tail_h({TailKind::HuslerReiss, 1.5}, 0.7, 1.2)));
    CHECK(s.conditional_quantile(5, {4}, 0.3, x) == doctest::Approx(tail_h_inv({TailKind::Dirichlet, 2.0}, 0.3, 2.0)));
    CHECK_THROWS_AS(s.conditional_cdf(1, {3}, x), Error);
    CHECK_THROWS_AS(s.conditional_cdf(2, {1, 3}, x), Error);  // 2 is conditioning in 13;2
    try {
        s.conditional_cdf(1, {4}, x);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidIndex);
    }
    Rng rng(5);
    const std::vector<std::pair<int, NodeSet>> idx{{1, {2}},       {3, {2}},          {1, {2, 3}},    {4, {2, 3}},
                                                   {5, {2, 4}},    {1, {2, 3, 4}},    {5, {2, 3, 4}}, {2, {4, 5}},
                                                   {3, {2, 4, 5}}, {4, {1, 2, 3}}};
    for (int i = 0; i < 100; ++i) {
        auto pt = random_point(rng, 5);
        auto [node, D] = idx[rng.below(idx.size())];
        double u = rng.uniform();
        double q = s.conditional_quantile(node, D, u, pt);
        pt[node - 1] = q;
        REQUIRE(std::fabs(s.conditional_cdf(node, D, pt) - u) < 1e-7);
        double u2 = std::min(0.999999, u + 0.1 * rng.uniform() + 1e-4);
        REQUIRE(s.conditional_quantile(node, D, u2, pt) > q);
    }
}

TEST_CASE("conditional cdf against quadrature of the HR density") {
    XVineSpec s = hr3_spec();
    Eigen::MatrixXd G = variogram();
    QuadratureOracle q([&](std::span<const double> p) { return oracle::hr_density(G, p); }, 3, 1e-11);
    Rng rng(6);
    for (int i = 0; i < 5; ++i) {
        auto x = random_point(rng, 3);
        CHECK(s.conditional_cdf(1, {2, 3}, x) == doctest::Approx(q.conditional_cdf(1, {2, 3}, x)).epsilon(1e-5));
        CHECK(s.conditional_cdf(3, {1, 2}, x) == doctest::Approx(q.conditional_cdf(3, {1, 2}, x)).epsilon(1e-5));
    }
}

TEST_CASE("recursion trace") {
    XVineSpec s = oracle::fig2_spec();
    std::vector<double> x{0.7, 1.2, 0.4, 2.0, 0.9};
    std::vector<std::string> trace;
    s.conditional_cdf(1, {2, 3, 4}, x, &trace);
    CHECK(trace == std::vector<std::string>{"R_{1|2}", "R_{3|2}", "C_{1|3;2}", "R_{4|2}", "C_{4|3;2}", "C_{1|4;23}"});
    trace.clear();
    s.conditional_quantile(2, {4, 5}, 0.4, x, &trace);
    CHECK(trace == std::vector<std::string>{"R_{5|4}", "Cinv_{2|5;4}", "Rinv_{2|4}"});
}

TEST_CASE("truncated specs never touch deeper trees") {
    XVineSpec full = oracle::fig2_spec();
    XVineSpec t2 = full.truncate(2);
    CHECK(t2.levels() == 2);
    // Another completion: change every pair above tree 2.
    std::map<EdgeKey, PairFamily> pairs = full.pairs();
    pairs[make_key(1, 4, {2, 3})] = {PairKind::Independence, 0};
    pairs[make_key(3, 5, {2, 4})] = {PairKind::Independence, 0};
    pairs[make_key(1, 5, {2, 3, 4})] = {PairKind::Independence, 0};
    XVineSpec indep(full.vine(), full.tails(), pairs);
    Rng rng(7);
    for (int i = 0; i < 10; ++i) {
        auto x = random_point(rng, 5);
        REQUIRE(t2.density(x) == doctest::Approx(indep.density(x)).epsilon(1e-13));
    }
}

TEST_CASE("exponent measure density") {
    XVineSpec s = oracle::fig2_spec();
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        auto y = random_point(rng, 5);
        std::vector<double> inv(5);
        double p2 = 1.0;
        for (int j = 0; j < 5; ++j) {
            inv[j] = 1.0 / y[j];
            p2 *= y[j] * y[j];
        }
        double lam = s.exponent_measure_density(y);
        REQUIRE(lam * p2 == doctest::Approx(s.density(inv)).epsilon(1e-13));
        REQUIRE(s.exponent_measure_density_degree_form(y) == doctest::Approx(lam).epsilon(1e-10));
    }
    XVineSpec hr2(VineSequence::from_pairs(2, {{{1, 2}}}), {{make_key(1, 2), {TailKind::HuslerReiss, 1.3}}}, {});
    std::vector<double> y{0.6, 1.7};
    CHECK(hr2.exponent_measure_density(y) == doctest::Approx(oracle::hr_exponent_density(1.3, 0.6, 1.7)).epsilon(1e-12));
    XVineSpec s3 = hr3_spec();
    std::vector<double> y3{0.5, 1.4, 2.2}, y3s{1.0, 2.8, 4.4};
    CHECK(s3.exponent_measure_density(y3s) == doctest::Approx(std::pow(2.0, -4.0) * s3.exponent_measure_density(y3)).epsilon(1e-12));
}

TEST_CASE("conditional copula density is free of the conditioning value") {
    XVineSpec s = hr3_spec();
    std::vector<double> x{1.0, 0.8, 1.0}, x3{1.0, 2.4, 1.0};
    double a = conditional_copula_density(s, 1, 3, {2}, 0.3, 0.7, x);
    double b = conditional_copula_density(s, 1, 3, {2}, 0.3, 0.7, x3);
    CHECK(std::fabs(a - b) < 1e-6);
    double rho = s.pair(make_key(1, 3, {2})).theta;
    CHECK(std::fabs(a - oracle::gaussian_copula_density(rho, 0.3, 0.7)) < 1e-4);
    CHECK_THROWS_AS(conditional_copula_density(oracle::fig2_spec(), 1, 3, {2}, 0.3, 0.7, std::vector<double>(5, 1.0)),
                    Error);
}
