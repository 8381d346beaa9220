#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// One-parameter bivariate copula families used as linking copulas.
//
// All (u, v) arguments are clamped into [kUnitClamp, 1 - kUnitClamp] before
// evaluation. Parameters must lie in the family domain, where the closed
// independence endpoint (Gaussian/t 0, Clayton 0, Gumbel 1) is accepted by the
// density and h-functions but not by the Kendall tau map.

namespace fcsv {

enum class CopulaFamily {
    Gaussian,
    StudentT4,
    Clayton,
    Gumbel,
    SurvivalClayton,
    SurvivalGumbel,
};

inline constexpr double kUnitClamp = 1e-12;

struct BivariateCopulaSpec {
    CopulaFamily family = CopulaFamily::Gaussian;
    double theta = 0.0;
};

/// Kendall's tau restricted to the open interval (0, 1).
class KendallTau {
public:
    explicit KendallTau(double tau);
    double value() const { return tau_; }

private:
    double tau_;
};

struct CopulaGradient {
    double d_theta = 0.0;
    double d_u = 0.0;
    double d_v = 0.0;
};

std::string_view family_name(CopulaFamily family);
std::optional<CopulaFamily> parse_family(std::string_view name);
/// Parses a comma separated family list; throws std::invalid_argument on unknown names.
std::vector<CopulaFamily> parse_family_list(std::string_view list);
std::string format_family_list(std::span<const CopulaFamily> families);

bool is_survival(CopulaFamily family);
CopulaFamily base_family(CopulaFamily family);

double clamp_unit(double u);

/// True if theta is admissible for density evaluation (independence endpoint included).
bool theta_in_domain(CopulaFamily family, double theta);

double log_density(const BivariateCopulaSpec& spec, double u, double v);
CopulaGradient grad_log_density(const BivariateCopulaSpec& spec, double u, double v);

/// Log density together with its gradient, sharing intermediate terms.
double log_density_and_gradient(const BivariateCopulaSpec& spec, double u, double v,
                                CopulaGradient& grad);

// Evaluation with precomputed margin scores. The elliptical families work on
// x = F^{-1}(clamp(u)), y = F^{-1}(clamp(v)) with F the normal or t4 cdf; callers
// that hold u (or v) fixed across many evaluations can compute the score once.
// For the other families the scores are ignored.
bool is_elliptical(CopulaFamily family);
double elliptical_score(CopulaFamily family, double u);
double log_density_scored(const BivariateCopulaSpec& spec, double u, double v, double x, double y);
double log_density_and_gradient_scored(const BivariateCopulaSpec& spec, double u, double v,
                                       double x, double y, CopulaGradient& grad);

/// Conditional distribution C(u | v) = dC(u, v)/dv.
double hfunc(const BivariateCopulaSpec& spec, double u, double v);
/// Inverse of hfunc in its first argument.
double hinv(const BivariateCopulaSpec& spec, double p, double v);

KendallTau theta_to_tau(CopulaFamily family, double theta);
double tau_to_theta(CopulaFamily family, KendallTau tau);

// Maps from the logit of Kendall's tau, delta = ln(tau / (1 - tau)), written
// per family so that large |delta| does not round tau to 0 or 1 first.
double theta_from_delta(CopulaFamily family, double delta);
double dtheta_ddelta(CopulaFamily family, double delta);

}  // namespace fcsv
