#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "xvine/error.hpp"
#include "xvine/numerics.hpp"
#include "xvine/rng.hpp"

using namespace xvine;

TEST_CASE("normal cdf and quantile") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    double c = std_normal_cdf(std::sqrt(1.5) / 2.0);
    CHECK(c == doctest::Approx(0.7290).epsilon(1e-3));
    CHECK(2.0 - 2.0 * c == doctest::Approx(0.54).epsilon(0.01));
    CHECK(std::fabs(std_normal_quantile(std_normal_cdf(1.234)) - 1.234) < 1e-9);
    CHECK_THROWS_AS(std_normal_quantile(0.0), Error);
    CHECK_THROWS_AS(std_normal_quantile(1.5), Error);
}

TEST_CASE("normal round trips over random points") {
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform();
        double z = std_normal_quantile(u);
        REQUIRE(std::fabs(std_normal_cdf(z) - u) < 1e-12);
        double x = 13.0 * rng.uniform() - 8.0;  // cdf near 1 has no resolution beyond 5
        REQUIRE(std::fabs(std_normal_quantile(std_normal_cdf(x)) - x) < 1e-9 * std::max(1.0, std::fabs(x)) * 10);
    }
}

TEST_CASE("incomplete beta and log gamma") {
    CHECK(reg_incomplete_beta(1.0, 2.5, 0.7) == doctest::Approx(1.0));
    CHECK(reg_incomplete_beta(0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    // I_x(1, b) = 1 - (1 - x)^b
    CHECK(reg_incomplete_beta(0.3, 1.0, 3.0) == doctest::Approx(1.0 - std::pow(0.7, 3.0)).epsilon(1e-13));
    CHECK(reg_incomplete_beta_c(0.3, 1.0, 3.0) == doctest::Approx(std::pow(0.7, 3.0)).epsilon(1e-13));
    CHECK(reg_incomplete_beta_inv(reg_incomplete_beta(0.37, 3.0, 2.0), 3.0, 2.0) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
    CHECK_THROWS_AS(reg_incomplete_beta(1.2, 1.0, 1.0), Error);
    CHECK_THROWS_AS(log_gamma(-1.0), Error);
    double chi = quad_1d([](double x) { return reg_incomplete_beta(1.0 / (1.0 + x), 3.0, 2.0); }, 0.0, 1.0);
    CHECK(std::fabs(chi - 0.62) <= 0.005 + 1e-9);  // 0.625
}

TEST_CASE("minimize_scalar") {
    auto m = minimize_scalar({[](double x) { return (x - 2.0) * (x - 2.0); }, 0.0, 10.0});
    CHECK(std::fabs(m.argmin - 2.0) < 1e-7);
    auto l = minimize_scalar({[](double x) { return std::pow(std::log(x) - 1.0, 2); }, 1e-3, 50.0, Transform::Log});
    CHECK(std::fabs(std::log(l.argmin) - 1.0) < 1e-7);
    auto s = minimize_scalar({[](double x) { return std::pow(x - 3.0, 2); }, 1.0 + 1e-6, 28.0, Transform::Log, 1.0});
    CHECK(s.argmin == doctest::Approx(3.0).epsilon(1e-6));
    // NaN near the lower end pushes the search inside.
    auto g = minimize_scalar({[](double x) { return x < 0.5 ? std::numeric_limits<double>::quiet_NaN() : (x - 1.0) * (x - 1.0); },
                              0.0, 4.0});
    CHECK(std::fabs(g.argmin - 1.0) < 1e-6);
}

TEST_CASE("invert_monotone") {
    CHECK(invert_monotone([](double x) { return x; }, 0.3, 0.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
    double z = invert_monotone(std_normal_cdf, 0.975, -1.0, 1.0, Expand::Real);
    CHECK(std::fabs(z - std_normal_quantile(0.975)) < 1e-6);
    CHECK(std::fabs(z - 1.95996) < 1e-5);
    double p = invert_monotone([](double x) { return std::log(x); }, 5.0, 0.5, 2.0, Expand::Positive);
    CHECK(p == doctest::Approx(std::exp(5.0)).epsilon(1e-9));
    CHECK_THROWS_AS(invert_monotone([](double x) { return x * x; }, -1.0, -1.0, 1.0), Error);
    CHECK_THROWS_AS(invert_monotone([](double) { return 0.0; }, 1.0, 0.0, 1.0), Error);
}

TEST_CASE("invert_monotone round trips") {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        double a = 0.5 + rng.uniform();
        double t = 3.0 * rng.uniform();
        auto f = [a](double x) { return std::atan(a * x) + x; };
        double x = invert_monotone(f, f(t), 0.0, 1.0, Expand::Real);
        REQUIRE(std::fabs(f(x) - f(t)) <= 1e-10);
    }
}

TEST_CASE("quadrature") {
    CHECK(quad_1d([](double) { return 1.0; }, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    // HR tail density with theta = 1.5 at y = 1, written out here as the oracle.
    auto r = [](double x) {
        double z = (std::log(x) - 0.75) / std::sqrt(1.5);
        return oracle::phi(z) / (x * std::sqrt(1.5));
    };
    CHECK(std::fabs(quad_1d(r, 0.0, kQuadUpper, 1e-9) - 1.0) < 1e-3);
    CHECK(quad_1d([](double x) { return 1.0 / (x * x); }, 1.0, std::numeric_limits<double>::infinity(), 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-8));
    double err = 0.0;
    integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12, &err);
    CHECK(err < 1e-10);
}

TEST_CASE("rng streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
    Rng s0 = Rng(42).substream(0), s1 = Rng(42).substream(1);
    CHECK(s0.next_u64() != s1.next_u64());
    Rng u(3);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double x = u.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::fabs(sum / 100000 - 0.5) < 0.005);
    Rng v(9);
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 30000; ++i) ++counts[v.below(3)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}
