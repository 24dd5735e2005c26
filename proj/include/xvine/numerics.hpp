#pragma once

#include <functional>
#include <limits>
#include <utility>

namespace xvine {

double std_normal_cdf(double z);
double std_normal_pdf(double z);
double std_normal_quantile(double u);

/// Regularised incomplete beta I_x(a,b).
double reg_incomplete_beta(double x, double a, double b);
/// 1 - I_x(a,b) without cancellation.
double reg_incomplete_beta_c(double x, double a, double b);
/// Inverse of x -> I_x(a,b).
double reg_incomplete_beta_inv(double p, double a, double b);
double log_gamma(double a);

enum class Transform { Identity, Log };

struct ScalarProblem {
    std::function<double(double)> objective;
    double lo = 0.0;
    double hi = 1.0;
    /// With Log the search runs over log(x - shift) for x in (lo, hi).
    Transform transform = Transform::Identity;
    double shift = 0.0;
};

struct ScalarMinimum {
    double argmin;
    double value;
};

/// Brent minimisation on the transformed scale. Non-finite objective values are
/// treated as +huge so the search is pushed back into the interior.
ScalarMinimum minimize_scalar(const ScalarProblem& p, double tol = 1e-8);

enum class Expand {
    None,      ///< bracket is fixed
    Positive,  ///< domain (0, inf): lo halves, hi doubles
    Real,      ///< domain R: bracket widens outward
};

/// Solves f(x) = target for increasing f. Throws BracketFailure when the target cannot be
/// bracketed.
double invert_monotone(const std::function<double(double)>& f, double target, double lo, double hi,
                       Expand expand = Expand::None, double tol = 1e-10);

inline constexpr double kQuadUpper = 1e6;

/// Double-exponential quadrature on [lo, hi] (tanh-sinh, or exp-sinh when hi is infinite or at
/// least kQuadUpper with lo >= 0). Throws NoConvergence when the relative error estimate stays
/// well above tol.
double quad_1d(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-8);

/// Same as quad_1d but never throws; the relative error estimate is written to *err when given.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol,
                 double* err = nullptr);

}  // namespace xvine
