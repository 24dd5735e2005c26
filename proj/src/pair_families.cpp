#include <algorithm>
#include <cmath>
#include <string>

#include "xvine/error.hpp"
#include "xvine/families.hpp"
#include "xvine/numerics.hpp"

namespace xvine {

namespace {

double clamp01(double u) { return std::clamp(u, kClamp, 1.0 - kClamp); }

double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double logsumexp(double a, double b) {
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

PairKind base_of(PairKind k) {
    switch (k) {
        case PairKind::SurvClayton: return PairKind::Clayton;
        case PairKind::SurvGumbel: return PairKind::Gumbel;
        case PairKind::SurvJoe: return PairKind::Joe;
        default: return k;
    }
}

bool is_rotated(PairKind k) { return base_of(k) != k; }

// log(u^-t + v^-t - 1) for the Clayton copula, with a = -t log u, b = -t log v.
double clayton_log_sum(double a, double b) {
    double m = std::max(a, b);
    if (m < 1.0) return std::log1p(std::expm1(a) + std::expm1(b));
    return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

// Base (unrotated) families on clamped inputs.
double base_log_density(PairKind k, double t, double u, double v) {
    switch (k) {
        case PairKind::Independence: return 0.0;
        case PairKind::Gaussian: {
            double x = std_normal_quantile(u), y = std_normal_quantile(v), s = 1.0 - t * t;
            return -0.5 * std::log(s) - (t * t * (x * x + y * y) - 2.0 * t * x * y) / (2.0 * s);
        }
        case PairKind::Clayton: {
            double lu = std::log(u), lv = std::log(v);
            double L = clayton_log_sum(-t * lu, -t * lv);
            return std::log1p(t) - (t + 1.0) * (lu + lv) - (1.0 / t + 2.0) * L;
        }
        case PairKind::Gumbel: {
            double lu = -std::log(u), lv = -std::log(v);
            double ls = logsumexp(t * std::log(lu), t * std::log(lv));  // log(x + y)
            double A = std::exp(ls / t);
            return -A + lu + lv + (-2.0 + 2.0 / t) * ls + (t - 1.0) * (std::log(lu) + std::log(lv)) +
                   std::log1p((t - 1.0) / A);
        }
        case PairKind::Frank: {
            if (t == 0.0) return 0.0;
            double a = std::expm1(-t * u), b = std::expm1(-t * v);
            double D = -std::expm1(-t) - a * b;
            return std::log(std::fabs(t * -std::expm1(-t))) - t * (u + v) - 2.0 * std::log(std::fabs(D));
        }
        case PairKind::Joe: {
            double lub = std::log1p(-u), lvb = std::log1p(-v);
            double la = t * lub, lb = t * lvb;
            double a = std::exp(la);
            double lS = logsumexp(la, lb + std::log1p(-a));
            double S = std::exp(lS);
            return (1.0 / t - 2.0) * lS + (t - 1.0) * (lub + lvb) + std::log(t - 1.0 + S);
        }
        default: break;
    }
    return NAN;
}

double base_h(PairKind k, double t, double u, double v) {
    switch (k) {
        case PairKind::Independence: return u;
        case PairKind::Gaussian:
            return std_normal_cdf((std_normal_quantile(u) - t * std_normal_quantile(v)) / std::sqrt(1.0 - t * t));
        case PairKind::Clayton: {
            double lu = std::log(u), lv = std::log(v);
            double L = clayton_log_sum(-t * lu, -t * lv);
            return std::exp(-(t + 1.0) * lv - (1.0 / t + 1.0) * L);
        }
        case PairKind::Gumbel: {
            double lu = -std::log(u), lv = -std::log(v);
            double ls = logsumexp(t * std::log(lu), t * std::log(lv));
            double A = std::exp(ls / t);
            return std::exp(-A + (1.0 / t - 1.0) * ls + (t - 1.0) * std::log(lv) + lv);
        }
        case PairKind::Frank: {
            if (t == 0.0) return u;
            double a = std::expm1(-t * u), b = std::expm1(-t * v);
            return std::exp(-t * v) * a / (std::expm1(-t) + a * b);
        }
        case PairKind::Joe: {
            double lub = std::log1p(-u), lvb = std::log1p(-v);
            double la = t * lub, lb = t * lvb;
            double a = std::exp(la);
            double lS = logsumexp(la, lb + std::log1p(-a));
            return std::exp((1.0 / t - 1.0) * lS + (t - 1.0) * lvb + std::log1p(-a));
        }
        default: break;
    }
    return NAN;
}

double base_h_inv(PairKind k, double t, double w, double v) {
    switch (k) {
        case PairKind::Independence: return w;
        case PairKind::Gaussian:
            return std_normal_cdf(std_normal_quantile(w) * std::sqrt(1.0 - t * t) + t * std_normal_quantile(v));
        case PairKind::Clayton: {
            double s = std::expm1(-t / (1.0 + t) * std::log(w));
            if (s <= 0.0) return 1.0 - kClamp;
            double lS = softplus(-t * std::log(v) + std::log(s));
            return std::exp(-lS / t);
        }
        default: {
            auto h = [&](double u) { return base_h(k, t, u, v); };
            const double lo = kClamp, hi = 1.0 - kClamp;
            if (w <= h(lo)) return lo;
            if (w >= h(hi)) return hi;
            return invert_monotone(h, w, lo, hi, Expand::None, 1e-13);
        }
    }
}

// Kendall's tau of an Archimedean copula: 1 + 4 * int_0^1 phi/phi'.
double joe_tau(double t) {
    if (t == 1.0) return 0.0;
    auto f = [t](double x) {
        double s = 1.0 - x;
        if (s <= 0.0) return 0.0;
        double st = std::exp(t * std::log(s));
        if (st <= 0.0 || st >= 1.0) return 0.0;  // the integrand vanishes at both ends
        return std::log1p(-st) * (1.0 - st) / (t * std::exp((t - 1.0) * std::log(s)));
    };
    return 1.0 + 4.0 * quad_1d(f, 0.0, 1.0, 1e-12);
}

double frank_tau(double t) {
    if (t == 0.0) return 0.0;
    // Debye form: 1 - 4/t + 4/t^2 int_0^t s/(e^s - 1) ds.
    auto f = [](double s) { return s == 0.0 ? 1.0 : s / std::expm1(s); };
    double I = t > 0 ? quad_1d(f, 0.0, t, 1e-13) : -quad_1d(f, t, 0.0, 1e-13);
    return 1.0 - 4.0 / t + 4.0 * I / (t * t);
}

}  // namespace

void check_pair(const PairFamily& c) {
    const double t = c.theta;
    bool ok = std::isfinite(t);
    switch (base_of(c.kind)) {
        case PairKind::Independence: break;
        case PairKind::Gaussian: ok = ok && t > -1.0 && t < 1.0; break;
        case PairKind::Clayton: ok = ok && t > 0.0; break;
        case PairKind::Gumbel: ok = ok && t >= 1.0; break;
        case PairKind::Frank: ok = ok && t != 0.0; break;
        case PairKind::Joe: ok = ok && t >= 1.0; break;
        default: break;
    }
    if (!ok) fail(ErrorKind::DomainError, to_string(c.kind) + " parameter " + std::to_string(t) + " out of domain");
}

double pair_log_density(const PairFamily& c, double u, double v) {
    check_pair(c);
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) fail(ErrorKind::DomainError, "pair copula arguments outside [0,1]");
    u = clamp01(u);
    v = clamp01(v);
    if (is_rotated(c.kind)) return base_log_density(base_of(c.kind), c.theta, 1.0 - u, 1.0 - v);
    return base_log_density(c.kind, c.theta, u, v);
}

double pair_density(const PairFamily& c, double u, double v) { return std::exp(pair_log_density(c, u, v)); }

double pair_h(const PairFamily& c, double u, double v) {
    check_pair(c);
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) fail(ErrorKind::DomainError, "pair copula arguments outside [0,1]");
    u = clamp01(u);
    v = clamp01(v);
    double h = is_rotated(c.kind) ? 1.0 - base_h(base_of(c.kind), c.theta, 1.0 - u, 1.0 - v)
                                  : base_h(c.kind, c.theta, u, v);
    return std::clamp(h, 0.0, 1.0);
}

double pair_h_inv(const PairFamily& c, double w, double v) {
    check_pair(c);
    if (!(w >= 0.0 && w <= 1.0 && v >= 0.0 && v <= 1.0)) fail(ErrorKind::DomainError, "pair copula arguments outside [0,1]");
    w = clamp01(w);
    v = clamp01(v);
    double u = is_rotated(c.kind) ? 1.0 - base_h_inv(base_of(c.kind), c.theta, 1.0 - w, 1.0 - v)
                                  : base_h_inv(c.kind, c.theta, w, v);
    return clamp01(u);
}

double pair_tau(const PairFamily& c) {
    check_pair(c);
    const double t = c.theta;
    switch (base_of(c.kind)) {
        case PairKind::Independence: return 0.0;
        case PairKind::Gaussian: return 2.0 / M_PI * std::asin(t);
        case PairKind::Clayton: return t / (t + 2.0);
        case PairKind::Gumbel: return 1.0 - 1.0 / t;
        case PairKind::Frank: return frank_tau(t);
        case PairKind::Joe: return joe_tau(t);
        default: break;
    }
    return NAN;
}

double pair_tau_inverse(PairKind kind, double tau) {
    if (!(tau > -1.0 && tau < 1.0)) fail(ErrorKind::DomainError, "tau must lie in (-1,1)");
    switch (base_of(kind)) {
        case PairKind::Independence: return 0.0;
        case PairKind::Gaussian: return std::sin(M_PI * tau / 2.0);
        case PairKind::Clayton:
            if (tau <= 0.0) fail(ErrorKind::DomainError, "Clayton needs tau > 0");
            return 2.0 * tau / (1.0 - tau);
        case PairKind::Gumbel:
            if (tau < 0.0) fail(ErrorKind::DomainError, "Gumbel needs tau >= 0");
            return 1.0 / (1.0 - tau);
        case PairKind::Frank:
        case PairKind::Joe: {
            if (base_of(kind) == PairKind::Joe && tau < 0.0) fail(ErrorKind::DomainError, "Joe needs tau >= 0");
            if (base_of(kind) == PairKind::Frank && tau == 0.0) fail(ErrorKind::DomainError, "Frank needs tau != 0");
            ParamBox box = search_box(base_of(kind));
            double lo = base_of(kind) == PairKind::Frank && tau > 0 ? 1e-9 : box.lo;
            double hi = base_of(kind) == PairKind::Frank && tau < 0 ? -1e-9 : box.hi;
            auto tau_of = [&](double t) { return pair_tau(PairFamily{base_of(kind), t}); };
            if (tau <= tau_of(lo)) return lo;
            if (tau >= tau_of(hi)) return hi;
            for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::fabs(hi)); ++i) {
                double mid = 0.5 * (lo + hi);
                (tau_of(mid) < tau ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        default: break;
    }
    return NAN;
}

int parameter_count(PairKind kind) { return kind == PairKind::Independence ? 0 : 1; }

ParamBox search_box(PairKind k) {
    switch (base_of(k)) {
        case PairKind::Independence: return {0.0, 0.0};
        case PairKind::Gaussian: return {-0.999, 0.999};
        case PairKind::Clayton: return {1e-6, 28.0};
        case PairKind::Gumbel: return {1.0, 17.0};
        case PairKind::Frank: return {-35.0, 35.0};
        case PairKind::Joe: return {1.0, 30.0};
        default: break;
    }
    return {0.0, 0.0};
}

std::string to_string(PairKind k) {
    switch (k) {
        case PairKind::Independence: return "indep";
        case PairKind::Gaussian: return "gaussian";
        case PairKind::Clayton: return "clayton";
        case PairKind::Gumbel: return "gumbel";
        case PairKind::Frank: return "frank";
        case PairKind::Joe: return "joe";
        case PairKind::SurvClayton: return "survclayton";
        case PairKind::SurvGumbel: return "survgumbel";
        case PairKind::SurvJoe: return "survjoe";
    }
    return "?";
}

bool parse_pair_kind(const std::string& s, PairKind& out) {
    for (PairKind k : all_pair_kinds())
        if (to_string(k) == s) {
            out = k;
            return true;
        }
    return false;
}

std::vector<PairKind> all_pair_kinds() {
    return {PairKind::Independence, PairKind::Gaussian, PairKind::Clayton,    PairKind::SurvClayton, PairKind::Gumbel,
            PairKind::SurvGumbel,   PairKind::Frank,    PairKind::Joe,        PairKind::SurvJoe};
}

}  // namespace xvine
