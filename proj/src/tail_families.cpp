#include <cmath>
#include <string>

#include "xvine/error.hpp"
#include "xvine/families.hpp"
#include "xvine/numerics.hpp"

namespace xvine {

namespace {

// log(1 + e^s) without overflow.
double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double logsumexp(double a, double b) {
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void check_point(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
        fail(ErrorKind::DomainError, "tail copula arguments must be positive and finite");
}

double dirichlet_log_const(double t) { return std::log(2.0) + log_gamma(2.0 * t) - 2.0 * log_gamma(t); }

}  // namespace

void check_tail(const TailFamily& f) {
    bool ok = std::isfinite(f.theta) && (f.kind == TailKind::Logistic ? f.theta > 1.0 : f.theta > 0.0);
    if (!ok) fail(ErrorKind::DomainError, to_string(f.kind) + " parameter " + std::to_string(f.theta) + " out of domain");
}

double tail_log_density(const TailFamily& f, double x, double y) {
    check_tail(f);
    check_point(x, y);
    const double t = f.theta, lx = std::log(x), ly = std::log(y);
    switch (f.kind) {
        case TailKind::HuslerReiss: {
            double z = (lx - ly - 0.5 * t);
            return -lx - 0.5 * std::log(2.0 * M_PI * t) - z * z / (2.0 * t);
        }
        case TailKind::Logistic:
            return std::log(t - 1.0) + (t - 1.0) * (lx + ly) + (1.0 / t - 2.0) * logsumexp(t * lx, t * ly);
        case TailKind::NegLogistic:
            return std::log1p(t) - (t + 1.0) * (lx + ly) + (-1.0 / t - 2.0) * logsumexp(-t * lx, -t * ly);
        case TailKind::Dirichlet:
            return dirichlet_log_const(t) - (2.0 * t + 1.0) * logsumexp(lx, ly) + t * (lx + ly);
    }
    return NAN;
}

double tail_density(const TailFamily& f, double x, double y) { return std::exp(tail_log_density(f, x, y)); }

double tail_h(const TailFamily& f, double x, double y) {
    check_tail(f);
    check_point(x, y);
    const double t = f.theta;
    const double r = std::log(x) - std::log(y);
    switch (f.kind) {
        case TailKind::HuslerReiss:
            return std_normal_cdf((r - 0.5 * t) / std::sqrt(t));
        case TailKind::Logistic:
            return -std::expm1((1.0 / t - 1.0) * softplus(t * r));
        case TailKind::NegLogistic:
            return std::exp(-(1.0 / t + 1.0) * softplus(-t * r));
        case TailKind::Dirichlet:
            // I_w(t+1, t) with w = x/(x+y); the complement form keeps precision near 1.
            if (x <= y) return reg_incomplete_beta(x / (x + y), t + 1.0, t);
            return reg_incomplete_beta_c(y / (x + y), t, t + 1.0);
    }
    return NAN;
}

double tail_h_inv(const TailFamily& f, double u, double y) {
    check_tail(f);
    if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::DomainError, "tail_h_inv needs u in (0,1)");
    check_point(1.0, y);
    const double t = f.theta;
    switch (f.kind) {
        case TailKind::HuslerReiss:
            return y * std::exp(0.5 * t + std::sqrt(t) * std_normal_quantile(u));
        case TailKind::Logistic: {
            double s = std::expm1(t / (1.0 - t) * std::log1p(-u));
            return y * std::exp(std::log(s) / t);
        }
        case TailKind::NegLogistic: {
            double s = std::expm1(-t / (1.0 + t) * std::log(u));
            return y * std::exp(-std::log(s) / t);
        }
        case TailKind::Dirichlet:
            if (u <= 0.5) {
                double w = reg_incomplete_beta_inv(u, t + 1.0, t);
                return y * w / (1.0 - w);
            } else {
                double w1 = reg_incomplete_beta_inv(1.0 - u, t, t + 1.0);  // 1 - w
                return y * (1.0 - w1) / w1;
            }
    }
    return NAN;
}

double tail_chi(const TailFamily& f) {
    check_tail(f);
    const double t = f.theta;
    switch (f.kind) {
        case TailKind::HuslerReiss: return 2.0 - 2.0 * std_normal_cdf(std::sqrt(t) / 2.0);
        case TailKind::Logistic: return 2.0 - std::pow(2.0, 1.0 / t);
        case TailKind::NegLogistic: return std::pow(2.0, -1.0 / t);
        case TailKind::Dirichlet:
            return quad_1d([t](double x) { return reg_incomplete_beta(1.0 / (1.0 + x), t + 1.0, t); }, 0.0, 1.0,
                           1e-12);
    }
    return NAN;
}

std::string to_string(TailKind k) {
    switch (k) {
        case TailKind::HuslerReiss: return "hr";
        case TailKind::Logistic: return "logistic";
        case TailKind::NegLogistic: return "neglogistic";
        case TailKind::Dirichlet: return "dirichlet";
    }
    return "?";
}

bool parse_tail_kind(const std::string& s, TailKind& out) {
    for (TailKind k : all_tail_kinds())
        if (to_string(k) == s) {
            out = k;
            return true;
        }
    return false;
}

std::vector<TailKind> all_tail_kinds() {
    return {TailKind::HuslerReiss, TailKind::NegLogistic, TailKind::Logistic, TailKind::Dirichlet};
}

ParamBox search_box(TailKind k) {
    switch (k) {
        case TailKind::HuslerReiss: return {1e-3, 50.0};
        case TailKind::Logistic: return {1.0 + 1e-6, 28.0};
        case TailKind::NegLogistic: return {1e-3, 28.0};
        case TailKind::Dirichlet: return {1e-3, 28.0};
    }
    return {0, 0};
}

}  // namespace xvine
