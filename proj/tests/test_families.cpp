#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "xvine/error.hpp"
#include "xvine/families.hpp"
#include "xvine/numerics.hpp"
#include "xvine/rng.hpp"

using namespace xvine;

namespace {

std::vector<TailFamily> tail_cases() {
    return {{TailKind::HuslerReiss, 1.5}, {TailKind::HuslerReiss, 0.2}, {TailKind::Logistic, 2.5},
            {TailKind::Logistic, 1.2},    {TailKind::NegLogistic, 2.0}, {TailKind::NegLogistic, 0.4},
            {TailKind::Dirichlet, 2.0},   {TailKind::Dirichlet, 0.5}};
}

std::vector<PairFamily> pair_cases() {
    return {{PairKind::Independence, 0.0}, {PairKind::Gaussian, 0.7},  {PairKind::Gaussian, -0.4},
            {PairKind::Clayton, 2.0},      {PairKind::Gumbel, 2.5},    {PairKind::Frank, 5.0},
            {PairKind::Frank, -3.0},       {PairKind::Joe, 2.0},       {PairKind::SurvClayton, 1.5},
            {PairKind::SurvGumbel, 1.8},   {PairKind::SurvJoe, 1.6}};
}

}  // namespace

TEST_CASE("tail densities: closed-form values and homogeneity") {
    CHECK(tail_density({TailKind::Logistic, 2.0}, 1.0, 1.0) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
    // HR written out directly.
    double x = 0.7, y = 1.9, t = 1.5;
    double hr = oracle::phi((std::log(x / y) - t / 2) / std::sqrt(t)) / (x * std::sqrt(t));
    CHECK(tail_density({TailKind::HuslerReiss, t}, x, y) == doctest::Approx(hr).epsilon(1e-13));
    for (const auto& f : tail_cases()) {
        double r = tail_density(f, x, y);
        CHECK(tail_density(f, 3.7 * x, 3.7 * y) == doctest::Approx(r / 3.7).epsilon(1e-12));
        CHECK(tail_log_density(f, x, y) == doctest::Approx(std::log(r)).epsilon(1e-12));
        // Symmetric families.
        CHECK(tail_density(f, y, x) == doctest::Approx(r).epsilon(1e-12));
    }
    CHECK_THROWS_AS(tail_density({TailKind::Logistic, 0.9}, 1.0, 1.0), Error);
    CHECK_THROWS_AS(tail_density({TailKind::HuslerReiss, 1.0}, -1.0, 1.0), Error);
}

TEST_CASE("tail densities have unit conditional margins") {
    for (const auto& f : tail_cases())
        for (double y : {0.5, 1.0, 2.0}) {
            double m = quad_1d([&](double s) { return tail_density(f, s, y); }, 0.0, kQuadUpper, 1e-9);
            INFO(to_string(f.kind) << " " << f.theta << " y=" << y);
            CHECK(std::fabs(m - 1.0) < 1e-3);
        }
}

TEST_CASE("tail h-functions") {
    CHECK(tail_h({TailKind::HuslerReiss, 1.0}, 1.0, 1.0) == doctest::Approx(0.3085375387).epsilon(1e-9));
    for (const auto& f : tail_cases()) {
        INFO(to_string(f.kind) << " " << f.theta);
        CHECK(tail_h(f, 5 * 2.3, 5 * 0.7) == doctest::Approx(tail_h(f, 2.3, 0.7)).epsilon(1e-12));
        CHECK(tail_h_inv(f, tail_h(f, 2.3, 0.7), 0.7) == doctest::Approx(2.3).epsilon(1e-8));
        double q = quad_1d([&](double s) { return tail_density(f, s, 0.7); }, 0.0, 2.3, 1e-11);
        CHECK(tail_h(f, 2.3, 0.7) == doctest::Approx(q).epsilon(1e-7));
        double prev = 0.0;
        for (double s = 0.05; s < 50; s *= 1.5) {
            double h = tail_h(f, s, 1.0);
            REQUIRE(h >= prev);
            REQUIRE(h <= 1.0);
            prev = h;
        }
    }
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        TailFamily f = tail_cases()[rng.below(8)];
        double u = rng.uniform(), y = std::exp(4 * rng.uniform() - 2);
        REQUIRE(tail_h(f, tail_h_inv(f, u, y), y) == doctest::Approx(u).epsilon(1e-8));
    }
}

TEST_CASE("tail dependence coefficients") {
    CHECK(std::fabs(tail_chi({TailKind::HuslerReiss, 1.5}) - 0.54) < 0.005);
    CHECK(tail_chi({TailKind::NegLogistic, 2.0}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(tail_chi({TailKind::Logistic, 2.5}) == doctest::Approx(2.0 - std::pow(2.0, 0.4)).epsilon(1e-14));
    CHECK(tail_chi({TailKind::Dirichlet, 2.0}) == doctest::Approx(0.625).epsilon(1e-10));  // printed as .62
    // chi = R(1,1) = int_0^1 R_{1|2}(1|y) dy.
    for (const auto& f : tail_cases()) {
        double q = quad_1d([&](double y) { return tail_h(f, 1.0, y); }, 0.0, 1.0, 1e-11);
        CHECK(tail_chi(f) == doctest::Approx(q).epsilon(1e-7));
    }
}

TEST_CASE("pair densities") {
    CHECK(pair_density({PairKind::Independence, 0.0}, 0.3, 0.8) == 1.0);
    CHECK(pair_density({PairKind::Gaussian, 0.7}, 0.5, 0.5) == doctest::Approx(1.0 / std::sqrt(0.51)).epsilon(1e-12));
    CHECK(pair_density({PairKind::Gaussian, 0.7}, 0.2, 0.9) ==
          doctest::Approx(oracle::gaussian_copula_density(0.7, 0.2, 0.9)).epsilon(1e-10));
    CHECK(pair_density({PairKind::Clayton, 2.0}, 0.2, 0.9) ==
          doctest::Approx(oracle::clayton_density(2.0, 0.2, 0.9)).epsilon(1e-12));
    CHECK(pair_density({PairKind::SurvClayton, 1.5}, 0.3, 0.6) ==
          doctest::Approx(pair_density({PairKind::Clayton, 1.5}, 0.7, 0.4)).epsilon(1e-13));
    CHECK(pair_density({PairKind::SurvGumbel, 1.8}, 0.3, 0.6) ==
          doctest::Approx(pair_density({PairKind::Gumbel, 1.8}, 0.7, 0.4)).epsilon(1e-13));
    CHECK_THROWS_AS(pair_density({PairKind::Gaussian, 1.0}, 0.3, 0.3), Error);
    CHECK_THROWS_AS(pair_density({PairKind::Frank, 0.0}, 0.3, 0.3), Error);
    CHECK(std::isfinite(pair_log_density({PairKind::Joe, 2.0}, 0.0, 1.0)));
}

TEST_CASE("pair densities integrate to one with uniform margins") {
    for (const auto& c : pair_cases()) {
        INFO(to_string(c.kind) << " " << c.theta);
        for (double v : {0.1, 0.5, 0.93}) {
            double m = quad_1d([&](double u) { return pair_density(c, u, v); }, 0.0, 1.0, 1e-10);
            CHECK(std::fabs(m - 1.0) < 1e-6);
        }
        for (double u : {0.2, 0.77}) {
            double m = quad_1d([&](double v) { return pair_density(c, u, v); }, 0.0, 1.0, 1e-10);
            CHECK(std::fabs(m - 1.0) < 1e-6);
        }
        double tot = quad_1d(
            // Near v = 0 the inner integrand is a spike the rule cannot resolve; its mass is still 1.
            [&](double v) { return integrate([&](double u) { return pair_density(c, u, v); }, 0.0, 1.0, 1e-9); },
            0.0, 1.0, 1e-8);
        CHECK(std::fabs(tot - 1.0) < 1e-6);
    }
}

TEST_CASE("pair h-functions") {
    CHECK(pair_h({PairKind::Independence, 0.0}, 0.37, 0.8) == doctest::Approx(0.37));
    CHECK(pair_h({PairKind::Gaussian, 0.0001}, 0.37, 0.8) == doctest::Approx(0.37).epsilon(1e-3));
    double g = oracle::Phi((oracle::Phi_inv(0.37) - 0.7 * oracle::Phi_inv(0.8)) / std::sqrt(0.51));
    CHECK(pair_h({PairKind::Gaussian, 0.7}, 0.37, 0.8) == doctest::Approx(g).epsilon(1e-12));
    CHECK(std::fabs(pair_h_inv({PairKind::Clayton, 2.0}, pair_h({PairKind::Clayton, 2.0}, 0.3, 0.6), 0.6) - 0.3) < 1e-9);
    Rng rng(6);
    for (const auto& c : pair_cases()) {
        INFO(to_string(c.kind) << " " << c.theta);
        CHECK(pair_h(c, 1e-14, 0.4) < 1e-6);
        CHECK(pair_h(c, 1.0 - 1e-14, 0.4) > 1.0 - 1e-6);
        for (int i = 0; i < 100; ++i) {
            double u = 0.02 + 0.96 * rng.uniform(), v = 0.02 + 0.96 * rng.uniform();
            double q = quad_1d([&](double s) { return pair_density(c, s, v); }, 0.0, u, 1e-10);
            REQUIRE(std::fabs(pair_h(c, u, v) - q) < 1e-6);
            double w = rng.uniform();
            REQUIRE(std::fabs(pair_h(c, pair_h_inv(c, w, v), v) - w) < 1e-9);
        }
        // Reflection identity for the rotated families.
        if (c.kind == PairKind::SurvClayton || c.kind == PairKind::SurvGumbel || c.kind == PairKind::SurvJoe) {
            PairKind base = c.kind == PairKind::SurvClayton  ? PairKind::Clayton
                            : c.kind == PairKind::SurvGumbel ? PairKind::Gumbel
                                                             : PairKind::Joe;
            CHECK(pair_h(c, 0.3, 0.6) == doctest::Approx(1.0 - pair_h({base, c.theta}, 0.7, 0.4)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Kendall's tau maps") {
    CHECK(pair_tau({PairKind::Clayton, 2.0}) == doctest::Approx(0.5));
    CHECK(pair_tau({PairKind::Gumbel, 2.5}) == doctest::Approx(0.6));
    CHECK(pair_tau({PairKind::Gaussian, 0.7}) == doctest::Approx(2.0 / M_PI * std::asin(0.7)));
    CHECK(std::fabs(pair_tau({PairKind::Gaussian, 0.7}) - 0.49) < 0.005);
    CHECK(pair_tau({PairKind::SurvClayton, 2.0}) == doctest::Approx(0.5));
    // Frank and Joe against the double-integral definition tau = 4 E[C(U,V)] - 1.
    for (PairFamily c : {PairFamily{PairKind::Frank, 5.0}, PairFamily{PairKind::Joe, 2.0}, PairFamily{PairKind::Frank, -3.0}}) {
        double e = quad_1d(
            [&](double v) {
                return quad_1d(
                    [&](double u) {
                        double C = quad_1d([&](double s) { return pair_h(c, u, s); }, 0.0, v, 1e-11);
                        return C * pair_density(c, u, v);
                    },
                    0.0, 1.0, 1e-7);
            },
            0.0, 1.0, 1e-6);
        CHECK(pair_tau(c) == doctest::Approx(4.0 * e - 1.0).epsilon(1e-4));
    }
    for (PairKind k : {PairKind::Gaussian, PairKind::Clayton, PairKind::Gumbel, PairKind::Frank, PairKind::Joe,
                       PairKind::SurvJoe})
        CHECK(pair_tau({k, pair_tau_inverse(k, 0.35)}) == doctest::Approx(0.35).epsilon(1e-8));
    for (PairKind k : {PairKind::Gaussian, PairKind::Frank})
        CHECK(pair_tau({k, pair_tau_inverse(k, -0.3)}) == doctest::Approx(-0.3).epsilon(1e-8));
}

TEST_CASE("names") {
    for (TailKind k : all_tail_kinds()) {
        TailKind back;
        CHECK(parse_tail_kind(to_string(k), back));
        CHECK(back == k);
    }
    for (PairKind k : all_pair_kinds()) {
        PairKind back;
        CHECK(parse_pair_kind(to_string(k), back));
        CHECK(back == k);
    }
    TailKind t;
    CHECK_FALSE(parse_tail_kind("gumbel", t));
    CHECK(to_string(PairKind::Independence) == "indep");
    CHECK(to_string(TailKind::HuslerReiss) == "hr");
    CHECK(all_pair_kinds().size() == 9);
}
