#include "xvine/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "xvine/error.hpp"

namespace xvine {

namespace {

// Boost reports domain problems by throwing; turn those into quiet NaNs and let our own
// checks decide.
using quiet = boost::math::policies::policy<boost::math::policies::domain_error<boost::math::policies::ignore_error>,
                                            boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
                                            boost::math::policies::evaluation_error<boost::math::policies::ignore_error>>;

constexpr double kHuge = 1e300;

}  // namespace

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double std_normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::DomainError, "normal quantile needs u in (0,1), got " + std::to_string(u));
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u, quiet());
}

double reg_incomplete_beta(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0))
        fail(ErrorKind::DomainError, "incomplete beta arguments out of range");
    return boost::math::ibeta(a, b, x, quiet());
}

double reg_incomplete_beta_c(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0))
        fail(ErrorKind::DomainError, "incomplete beta arguments out of range");
    return boost::math::ibetac(a, b, x, quiet());
}

double reg_incomplete_beta_inv(double p, double a, double b) {
    if (!(p >= 0.0 && p <= 1.0) || !(a > 0.0) || !(b > 0.0))
        fail(ErrorKind::DomainError, "inverse incomplete beta arguments out of range");
    return boost::math::ibeta_inv(a, b, p, quiet());
}

double log_gamma(double a) {
    if (!(a > 0.0)) fail(ErrorKind::DomainError, "log_gamma needs a > 0");
    return boost::math::lgamma(a, quiet());
}

ScalarMinimum minimize_scalar(const ScalarProblem& p, double tol) {
    if (!(p.lo < p.hi)) fail(ErrorKind::DomainError, "empty bracket");
    const bool logt = p.transform == Transform::Log;
    auto to_x = [&](double t) { return logt ? p.shift + std::exp(t) : t; };
    double tlo = logt ? std::log(p.lo - p.shift) : p.lo;
    double thi = logt ? std::log(p.hi - p.shift) : p.hi;
    if (!std::isfinite(tlo) || !std::isfinite(thi)) fail(ErrorKind::DomainError, "bracket not representable on log scale");
    auto g = [&](double t) {
        double v = p.objective(to_x(t));
        return std::isfinite(v) ? v : kHuge;
    };
    // brent_find_minima converges to ~2^-bits relative; 200 iterations is the hard cap.
    int bits = std::min(52, std::max(8, static_cast<int>(-std::log2(tol)) + 2));
    std::uintmax_t iters = 200;
    auto [t, v] = boost::math::tools::brent_find_minima(g, tlo, thi, bits, iters);
    if (iters >= 200) fail(ErrorKind::NoConvergence, "scalar minimisation hit 200 iterations");
    return {to_x(t), v};
}

double invert_monotone(const std::function<double(double)>& f, double target, double lo, double hi, Expand expand,
                       double tol) {
    double flo = f(lo), fhi = f(hi);
    for (int i = 0; i < 200 && flo > target; ++i) {
        if (expand == Expand::None) break;
        hi = lo;
        fhi = flo;
        lo = expand == Expand::Positive ? lo * 0.5 : lo - 2.0 * (1.0 + std::fabs(lo));
        flo = f(lo);
    }
    for (int i = 0; i < 200 && fhi < target; ++i) {
        if (expand == Expand::None) break;
        lo = hi;
        flo = fhi;
        hi = expand == Expand::Positive ? hi * 2.0 : hi + 2.0 * (1.0 + std::fabs(hi));
        fhi = f(hi);
    }
    if (!(flo <= target && target <= fhi))
        fail(ErrorKind::BracketFailure, "target " + std::to_string(target) + " not bracketed");
    if (flo == target) return lo;
    if (fhi == target) return hi;
    auto g = [&](double x) { return f(x) - target; };
    std::uintmax_t iters = 300;
    // Terminate on the x-interval; then polish by bisection until the residual meets tol.
    auto stop = [](double a, double b) { return std::fabs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::fabs(a); };
    auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, flo - target, fhi - target, stop, iters, quiet());
    double ga = g(a), gb = g(b);
    double x = std::fabs(ga) <= std::fabs(gb) ? a : b;
    // A non-monotone f can end with a bracket that has no sign change.
    if (std::min(std::fabs(ga), std::fabs(gb)) > tol && !(ga <= 0 && gb >= 0))
        fail(ErrorKind::BracketFailure, "root not bracketed after refinement");
    return x;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol, double* err) {
    if (!(hi > lo)) {
        if (err) *err = 0.0;
        return 0.0;
    }
    double e = 0.0, l1 = 0.0, v;
    auto g = [&f](double x) { return f(x); };
    // Double-exponential rules cope with the endpoint singularities and the heavy tails of the
    // densities integrated here; they never evaluate at the endpoints themselves.
    if (std::isinf(hi) || (hi >= kQuadUpper && lo >= 0.0)) {
        thread_local boost::math::quadrature::exp_sinh<double> es;
        v = es.integrate(g, lo, std::numeric_limits<double>::infinity(), tol, &e, &l1);
    } else {
        thread_local boost::math::quadrature::tanh_sinh<double> ts;
        v = ts.integrate(g, lo, hi, tol, &e, &l1);
    }
    if (err) *err = e / std::max(1.0, l1);
    return v;
}

double quad_1d(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double err = 0.0;
    double v = integrate(f, lo, hi, tol, &err);
    if (!std::isfinite(v) || err > std::max(100.0 * tol, 1e-9))
        fail(ErrorKind::NoConvergence, "quadrature error estimate " + std::to_string(err) + " above tolerance");
    return v;
}

}  // namespace xvine
