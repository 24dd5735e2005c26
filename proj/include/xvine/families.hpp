#pragma once

#include <string>
#include <vector>

namespace xvine {

enum class TailKind { HuslerReiss, Logistic, NegLogistic, Dirichlet };

struct TailFamily {
    TailKind kind = TailKind::HuslerReiss;
    double theta = 1.0;
    friend bool operator==(const TailFamily&, const TailFamily&) = default;
};

/// Bivariate tail copula density r(x, y); symmetric in (x, y) for every family here.
double tail_density(const TailFamily& f, double x, double y);
double tail_log_density(const TailFamily& f, double x, double y);
/// R_{1|2}(x | y) = integral of r(s, y) over s in (0, x).
double tail_h(const TailFamily& f, double x, double y);
double tail_h_inv(const TailFamily& f, double u, double y);
double tail_chi(const TailFamily& f);
void check_tail(const TailFamily& f);

enum class PairKind { Independence, Gaussian, Clayton, Gumbel, Frank, Joe, SurvClayton, SurvGumbel, SurvJoe };

struct PairFamily {
    PairKind kind = PairKind::Independence;
    double theta = 0.0;
    friend bool operator==(const PairFamily&, const PairFamily&) = default;
};

/// Inputs are clamped to [kClamp, 1 - kClamp].
inline constexpr double kClamp = 1e-12;

double pair_density(const PairFamily& c, double u, double v);
double pair_log_density(const PairFamily& c, double u, double v);
/// h(u | v) = dC(u, v)/dv. Every family in the catalogue is exchangeable, so the other
/// orientation is h(v | u) = pair_h(c, v, u).
double pair_h(const PairFamily& c, double u, double v);
double pair_h_inv(const PairFamily& c, double w, double v);
double pair_tau(const PairFamily& c);
/// Parameter with the given Kendall tau. Closed forms for Gaussian, Clayton, Gumbel and
/// their rotations; Frank and Joe by bisection on the numerical tau map.
double pair_tau_inverse(PairKind kind, double tau);
void check_pair(const PairFamily& c);
int parameter_count(PairKind kind);

struct ParamBox {
    double lo;
    double hi;
};
ParamBox search_box(TailKind k);
ParamBox search_box(PairKind k);

std::string to_string(TailKind k);
std::string to_string(PairKind k);
/// Accepts the lowercase serialised names; returns false on unknown names.
bool parse_tail_kind(const std::string& s, TailKind& out);
bool parse_pair_kind(const std::string& s, PairKind& out);

std::vector<TailKind> all_tail_kinds();
std::vector<PairKind> all_pair_kinds();

}  // namespace xvine
