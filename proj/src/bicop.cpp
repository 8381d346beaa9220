#include "fcsv/bicop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fcsv/special.hpp"

namespace fcsv {

namespace sp = special;

namespace {

constexpr std::array<std::pair<CopulaFamily, std::string_view>, 6> kNames{{
    {CopulaFamily::Gaussian, "gaussian"},
    {CopulaFamily::StudentT4, "student_t4"},
    {CopulaFamily::Clayton, "clayton"},
    {CopulaFamily::Gumbel, "gumbel"},
    {CopulaFamily::SurvivalClayton, "survival_clayton"},
    {CopulaFamily::SurvivalGumbel, "survival_gumbel"},
}};

[[noreturn]] void domain_fail(CopulaFamily family, double theta)
{
    throw std::domain_error("copula parameter " + std::to_string(theta) +
                            " outside the domain of family " +
                            std::string(family_name(family)));
}

void check_theta(CopulaFamily family, double theta)
{
    if (!theta_in_domain(family, theta)) {
        domain_fail(family, theta);
    }
}

// ---------------------------------------------------------------------------
// Base family kernels. Each returns ln c and fills the gradient when asked.

// The elliptical kernels take x, y on the quantile scale of their margins.
double gaussian_eval(double rho, double x, double y, CopulaGradient* g)
{
    const double d = 1.0 - rho * rho;
    const double s2 = x * x + y * y;
    const double ld = -0.5 * std::log(d) - (rho * rho * s2 - 2.0 * rho * x * y) / (2.0 * d);
    if (g != nullptr) {
        g->d_theta = (rho * d + (1.0 + rho * rho) * x * y - rho * s2) / (d * d);
        g->d_u = rho * (y - rho * x) / d / sp::normal_pdf(x);
        g->d_v = rho * (x - rho * y) / d / sp::normal_pdf(y);
    }
    return ld;
}

// ln Gamma(3) + ln Gamma(2) - 2 ln Gamma(5/2)
const double kT4Const = std::log(2.0) - 2.0 * std::log(0.75 * std::sqrt(sp::kPi));

double t4_eval(double rho, double x, double y, CopulaGradient* g)
{
    constexpr double nu = 4.0;
    const double d = 1.0 - rho * rho;
    const double q = x * x + y * y - 2.0 * rho * x * y;
    const double ld = kT4Const - 0.5 * std::log(d) - 3.0 * std::log1p(q / (nu * d)) +
                      2.5 * (std::log1p(x * x / nu) + std::log1p(y * y / nu));
    if (g != nullptr) {
        const double den = nu * d + q;
        g->d_theta = rho / d - 6.0 * (rho * q - x * y * d) / (d * den);
        const double dx = -6.0 * (x - rho * y) / den + 5.0 * x / (nu + x * x);
        const double dy = -6.0 * (y - rho * x) / den + 5.0 * y / (nu + y * y);
        g->d_u = dx / sp::t4_pdf(x);
        g->d_v = dy / sp::t4_pdf(y);
    }
    return ld;
}

double clayton_eval(double theta, double u, double v, CopulaGradient* g)
{
    const double lu = std::log(u);
    const double lv = std::log(v);
    if (theta < 1e-12) {
        if (g != nullptr) {
            g->d_theta = (1.0 + lu) * (1.0 + lv);
            g->d_u = 0.0;
            g->d_v = 0.0;
        }
        return 0.0;
    }
    const double x = -lu;
    const double y = -lv;
    const double a = theta * x;
    const double b = theta * y;
    const double m = std::max(a, b);
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    const double s = ea + eb - std::exp(-m);
    const double log_a = m + std::log(s);
    const double ld = std::log1p(theta) + (1.0 + theta) * (x + y) - (2.0 + 1.0 / theta) * log_a;
    if (g != nullptr) {
        const double dlog_a = (x * ea + y * eb) / s;
        g->d_theta = 1.0 / (1.0 + theta) + x + y + log_a / (theta * theta) -
                     (2.0 + 1.0 / theta) * dlog_a;
        g->d_u = (-(1.0 + theta) + (2.0 * theta + 1.0) * ea / s) / u;
        g->d_v = (-(1.0 + theta) + (2.0 * theta + 1.0) * eb / s) / v;
    }
    return ld;
}

struct GumbelTerms {
    double x, y, lx, ly, log_a, b;
};

GumbelTerms gumbel_terms(double theta, double u, double v)
{
    GumbelTerms t{};
    t.x = -std::log(u);
    t.y = -std::log(v);
    t.lx = std::log(t.x);
    t.ly = std::log(t.y);
    const double hi = std::max(t.lx, t.ly);
    const double lo = std::min(t.lx, t.ly);
    t.log_a = theta * hi + std::log1p(std::exp(theta * (lo - hi)));
    t.b = std::exp(t.log_a / theta);
    return t;
}

double gumbel_eval(double theta, double u, double v, CopulaGradient* g)
{
    const GumbelTerms t = gumbel_terms(theta, u, v);
    const double b = t.b;
    const double tm1 = theta - 1.0;
    const double ld = -b + t.x + t.y + tm1 * (t.lx + t.ly) + (2.0 / theta - 2.0) * t.log_a +
                      std::log1p(tm1 / b);
    if (g != nullptr) {
        const double wx = std::exp(theta * t.lx - t.log_a);
        const double wy = std::exp(theta * t.ly - t.log_a);
        const double dlog_a = wx * t.lx + wy * t.ly;
        const double db = b * (dlog_a / theta - t.log_a / (theta * theta));
        const double tail = b * (b + tm1);
        g->d_theta = -db + t.lx + t.ly - 2.0 * t.log_a / (theta * theta) +
                     (2.0 / theta - 2.0) * dlog_a + (b - tm1 * db) / tail;
        const double bx = b * wx / t.x;
        const double by = b * wy / t.y;
        const double dx = -bx + 1.0 + tm1 / t.x + (2.0 - 2.0 * theta) * wx / t.x - tm1 * bx / tail;
        const double dy = -by + 1.0 + tm1 / t.y + (2.0 - 2.0 * theta) * wy / t.y - tm1 * by / tail;
        g->d_u = -dx / u;
        g->d_v = -dy / v;
    }
    return ld;
}

double base_eval(CopulaFamily base, double theta, double u, double v, CopulaGradient* g)
{
    switch (base) {
    case CopulaFamily::Gaussian:
        return gaussian_eval(theta, sp::normal_quantile(u), sp::normal_quantile(v), g);
    case CopulaFamily::StudentT4:
        return t4_eval(theta, sp::t4_quantile(u), sp::t4_quantile(v), g);
    case CopulaFamily::Clayton:
        return clayton_eval(theta, u, v, g);
    case CopulaFamily::Gumbel:
        return gumbel_eval(theta, u, v, g);
    default:
        break;
    }
    throw std::logic_error("not a base family");
}

double eval(const BivariateCopulaSpec& spec, double u, double v, CopulaGradient* g)
{
    check_theta(spec.family, spec.theta);
    u = clamp_unit(u);
    v = clamp_unit(v);
    if (!is_survival(spec.family)) {
        return base_eval(spec.family, spec.theta, u, v, g);
    }
    const double ld =
        base_eval(base_family(spec.family), spec.theta, clamp_unit(1.0 - u), clamp_unit(1.0 - v), g);
    if (g != nullptr) {
        g->d_u = -g->d_u;
        g->d_v = -g->d_v;
    }
    return ld;
}

// Same as eval with the elliptical scores of the clamped u, v supplied by the caller.
double eval_scored(const BivariateCopulaSpec& spec, double u, double v, double x, double y,
                   CopulaGradient* g)
{
    switch (spec.family) {
    case CopulaFamily::Gaussian:
        check_theta(spec.family, spec.theta);
        return gaussian_eval(spec.theta, x, y, g);
    case CopulaFamily::StudentT4:
        check_theta(spec.family, spec.theta);
        return t4_eval(spec.theta, x, y, g);
    default:
        return eval(spec, u, v, g);
    }
}

// ---------------------------------------------------------------------------
// h-functions of the base families

double base_hfunc(CopulaFamily base, double theta, double u, double v)
{
    switch (base) {
    case CopulaFamily::Gaussian: {
        const double x = sp::normal_quantile(u);
        const double y = sp::normal_quantile(v);
        return sp::normal_cdf((x - theta * y) / std::sqrt(1.0 - theta * theta));
    }
    case CopulaFamily::StudentT4: {
        const double x = sp::t4_quantile(u);
        const double y = sp::t4_quantile(v);
        const double scale = std::sqrt((4.0 + y * y) * (1.0 - theta * theta) / 5.0);
        return sp::t5_cdf((x - theta * y) / scale);
    }
    case CopulaFamily::Clayton: {
        if (theta < 1e-12) {
            return u;
        }
        const double x = -std::log(u);
        const double y = -std::log(v);
        const double a = theta * x;
        const double b = theta * y;
        const double m = std::max(a, b);
        const double log_a = m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
        return std::exp((theta + 1.0) * y - (1.0 / theta + 1.0) * log_a);
    }
    case CopulaFamily::Gumbel: {
        const GumbelTerms t = gumbel_terms(theta, u, v);
        return std::exp(-t.b + (1.0 / theta - 1.0) * t.log_a + (theta - 1.0) * t.ly + t.y);
    }
    default:
        break;
    }
    throw std::logic_error("not a base family");
}

// Safeguarded Newton iteration on a monotone h-function, bracketed by bisection.
double solve_hinv(CopulaFamily base, double theta, double p, double v)
{
    constexpr int kMaxIter = 200;
    constexpr double kTol = 1e-10;
    double lo = kUnitClamp;
    double hi = 1.0 - kUnitClamp;
    if (p <= base_hfunc(base, theta, lo, v)) {
        return lo;
    }
    if (p >= base_hfunc(base, theta, hi, v)) {
        return hi;
    }
    double u = p;
    for (int it = 0; it < kMaxIter; ++it) {
        const double f = base_hfunc(base, theta, u, v) - p;
        if (std::abs(f) <= 1e-15) {
            return u;
        }
        if (f > 0.0) {
            hi = u;
        } else {
            lo = u;
        }
        const double dens = std::exp(base_eval(base, theta, u, v, nullptr));
        double next = u - f / dens;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - u) < 1e-15 || hi - lo < 1e-15) {
            return next;
        }
        u = next;
    }
    const double f = base_hfunc(base, theta, u, v) - p;
    if (std::abs(f) > kTol) {
        throw std::runtime_error("hinv did not converge");
    }
    return u;
}

double base_hinv(CopulaFamily base, double theta, double p, double v)
{
    switch (base) {
    case CopulaFamily::Gaussian: {
        const double y = sp::normal_quantile(v);
        return sp::normal_cdf(theta * y + std::sqrt(1.0 - theta * theta) * sp::normal_quantile(p));
    }
    case CopulaFamily::StudentT4: {
        const double y = sp::t4_quantile(v);
        const double scale = std::sqrt((4.0 + y * y) * (1.0 - theta * theta) / 5.0);
        return sp::t4_cdf(theta * y + scale * sp::t5_quantile(p));
    }
    case CopulaFamily::Clayton: {
        if (theta < 1e-12) {
            return p;
        }
        // -theta ln u = ln(1 + v^-theta expm1(-theta/(1+theta) ln p))
        const double b = -theta * std::log(v);
        const double c = -theta / (1.0 + theta) * std::log(p);
        const double g = b + std::log(std::expm1(c));
        return std::exp(-sp::softplus(g) / theta);
    }
    case CopulaFamily::Gumbel:
        return solve_hinv(base, theta, p, v);
    default:
        break;
    }
    throw std::logic_error("not a base family");
}

}  // namespace

KendallTau::KendallTau(double tau) : tau_(tau)
{
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::domain_error("Kendall's tau must lie in (0, 1), got " + std::to_string(tau));
    }
}

std::string_view family_name(CopulaFamily family)
{
    for (const auto& [f, name] : kNames) {
        if (f == family) {
            return name;
        }
    }
    return "unknown";
}

std::optional<CopulaFamily> parse_family(std::string_view name)
{
    for (const auto& [f, n] : kNames) {
        if (n == name) {
            return f;
        }
    }
    return std::nullopt;
}

std::vector<CopulaFamily> parse_family_list(std::string_view list)
{
    std::vector<CopulaFamily> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t end = std::min(list.find(',', start), list.size());
        std::string_view item = list.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') {
            item.remove_prefix(1);
        }
        while (!item.empty() && item.back() == ' ') {
            item.remove_suffix(1);
        }
        const auto fam = parse_family(item);
        if (!fam) {
            throw std::invalid_argument("unknown copula family '" + std::string(item) + "'");
        }
        if (std::find(out.begin(), out.end(), *fam) != out.end()) {
            throw std::invalid_argument("duplicate copula family '" + std::string(item) + "'");
        }
        out.push_back(*fam);
        start = end + 1;
    }
    return out;
}

std::string format_family_list(std::span<const CopulaFamily> families)
{
    std::string out;
    for (std::size_t i = 0; i < families.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += family_name(families[i]);
    }
    return out;
}

bool is_survival(CopulaFamily family)
{
    return family == CopulaFamily::SurvivalClayton || family == CopulaFamily::SurvivalGumbel;
}

CopulaFamily base_family(CopulaFamily family)
{
    switch (family) {
    case CopulaFamily::SurvivalClayton:
        return CopulaFamily::Clayton;
    case CopulaFamily::SurvivalGumbel:
        return CopulaFamily::Gumbel;
    default:
        return family;
    }
}

double clamp_unit(double u) { return std::clamp(u, kUnitClamp, 1.0 - kUnitClamp); }

bool theta_in_domain(CopulaFamily family, double theta)
{
    if (!std::isfinite(theta)) {
        return false;
    }
    switch (base_family(family)) {
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT4:
        return theta >= 0.0 && theta < 1.0;
    case CopulaFamily::Clayton:
        return theta >= 0.0;
    case CopulaFamily::Gumbel:
        return theta >= 1.0;
    default:
        return false;
    }
}

double log_density(const BivariateCopulaSpec& spec, double u, double v)
{
    return eval(spec, u, v, nullptr);
}

CopulaGradient grad_log_density(const BivariateCopulaSpec& spec, double u, double v)
{
    CopulaGradient g;
    eval(spec, u, v, &g);
    return g;
}

double log_density_and_gradient(const BivariateCopulaSpec& spec, double u, double v,
                                CopulaGradient& grad)
{
    return eval(spec, u, v, &grad);
}

bool is_elliptical(CopulaFamily family)
{
    return family == CopulaFamily::Gaussian || family == CopulaFamily::StudentT4;
}

double elliptical_score(CopulaFamily family, double u)
{
    switch (family) {
    case CopulaFamily::Gaussian:
        return sp::normal_quantile(clamp_unit(u));
    case CopulaFamily::StudentT4:
        return sp::t4_quantile(clamp_unit(u));
    default:
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double log_density_scored(const BivariateCopulaSpec& spec, double u, double v, double x, double y)
{
    return eval_scored(spec, u, v, x, y, nullptr);
}

double log_density_and_gradient_scored(const BivariateCopulaSpec& spec, double u, double v,
                                       double x, double y, CopulaGradient& grad)
{
    return eval_scored(spec, u, v, x, y, &grad);
}

double hfunc(const BivariateCopulaSpec& spec, double u, double v)
{
    check_theta(spec.family, spec.theta);
    u = clamp_unit(u);
    v = clamp_unit(v);
    double h = 0.0;
    if (!is_survival(spec.family)) {
        h = base_hfunc(spec.family, spec.theta, u, v);
    } else {
        h = 1.0 - base_hfunc(base_family(spec.family), spec.theta, clamp_unit(1.0 - u),
                             clamp_unit(1.0 - v));
    }
    return std::clamp(h, 0.0, 1.0);
}

double hinv(const BivariateCopulaSpec& spec, double p, double v)
{
    check_theta(spec.family, spec.theta);
    p = clamp_unit(p);
    v = clamp_unit(v);
    if (!is_survival(spec.family)) {
        return clamp_unit(base_hinv(spec.family, spec.theta, p, v));
    }
    const double w = base_hinv(base_family(spec.family), spec.theta, clamp_unit(1.0 - p),
                               clamp_unit(1.0 - v));
    return clamp_unit(1.0 - w);
}

KendallTau theta_to_tau(CopulaFamily family, double theta)
{
    if (!theta_in_domain(family, theta)) {
        domain_fail(family, theta);
    }
    double tau = 0.0;
    switch (base_family(family)) {
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT4:
        tau = 2.0 / sp::kPi * std::asin(theta);
        break;
    case CopulaFamily::Clayton:
        tau = theta / (theta + 2.0);
        break;
    case CopulaFamily::Gumbel:
        tau = 1.0 - 1.0 / theta;
        break;
    default:
        break;
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        domain_fail(family, theta);
    }
    return KendallTau(tau);
}

double tau_to_theta(CopulaFamily family, KendallTau tau)
{
    const double t = tau.value();
    switch (base_family(family)) {
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT4:
        return std::sin(0.5 * sp::kPi * t);
    case CopulaFamily::Clayton:
        return 2.0 * t / (1.0 - t);
    case CopulaFamily::Gumbel:
        return 1.0 / (1.0 - t);
    default:
        break;
    }
    throw std::logic_error("unhandled family");
}

double theta_from_delta(CopulaFamily family, double delta)
{
    switch (base_family(family)) {
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT4:
        return std::sin(0.5 * sp::kPi * sp::sigmoid(delta));
    case CopulaFamily::Clayton:
        return 2.0 * std::exp(delta);
    case CopulaFamily::Gumbel:
        return 1.0 + std::exp(delta);
    default:
        break;
    }
    throw std::logic_error("unhandled family");
}

double dtheta_ddelta(CopulaFamily family, double delta)
{
    switch (base_family(family)) {
    case CopulaFamily::Gaussian:
    case CopulaFamily::StudentT4: {
        const double tau = sp::sigmoid(delta);
        // cos(pi tau / 2) = sin(pi (1 - tau) / 2)
        const double c = std::sin(0.5 * sp::kPi * sp::sigmoid(-delta));
        return 0.5 * sp::kPi * c * tau * (1.0 - tau);
    }
    case CopulaFamily::Clayton:
        return 2.0 * std::exp(delta);
    case CopulaFamily::Gumbel:
        return std::exp(delta);
    default:
        break;
    }
    throw std::logic_error("unhandled family");
}

}  // namespace fcsv
