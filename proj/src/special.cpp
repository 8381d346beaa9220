#include "fcsv/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace fcsv::special {

double sigmoid(double x)
{
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x)
{
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double normal_pdf(double x) { return std::exp(normal_log_pdf(x)); }

double normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p)
{
    if (p <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (p >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double t4_log_pdf(double x)
{
    // Gamma(5/2) / (sqrt(4 pi) Gamma(2)) = 3/8
    return std::log(0.375) - 2.5 * std::log1p(0.25 * x * x);
}

double t4_pdf(double x) { return std::exp(t4_log_pdf(x)); }

namespace {

// Lower-tail mass of t4 at -|x|, written as e^2 (3 - e) / 4 with
// e = 1 - |x| / sqrt(4 + x^2) computed without cancellation.
double t4_lower_tail(double ax)
{
    const double r = std::sqrt(4.0 + ax * ax);
    const double e = 4.0 / (r * (r + ax));
    return 0.25 * e * e * (3.0 - e);
}

}  // namespace

double t4_cdf(double x)
{
    if (std::isinf(x)) {
        return x > 0 ? 1.0 : 0.0;
    }
    const double tail = t4_lower_tail(std::abs(x));
    return x < 0.0 ? tail : 1.0 - tail;
}

double t4_quantile(double p)
{
    if (p <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (p >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (p == 0.5) {
        return 0.0;
    }
    // Shaw's closed form for four degrees of freedom.
    const double alpha = 4.0 * p * (1.0 - p);
    const double sa = std::sqrt(alpha);
    const double q = std::cos(std::acos(sa) / 3.0) / sa;
    double x = 2.0 * std::sqrt(std::max(q - 1.0, 0.0));
    if (p < 0.5) {
        x = -x;
    }
    // One Newton polish step against the tail-accurate cdf.
    const double pl = std::min(p, 1.0 - p);
    const double xl = -std::abs(x);
    const double f = t4_pdf(xl);
    if (f > 0.0) {
        const double step = (t4_lower_tail(std::abs(xl)) - pl) / f;
        const double xr = xl - step;
        x = p < 0.5 ? xr : -xr;
    }
    return x;
}

double t5_cdf(double x)
{
    static const boost::math::students_t_distribution<double> dist(5.0);
    if (std::isinf(x)) {
        return x > 0 ? 1.0 : 0.0;
    }
    return boost::math::cdf(dist, x);
}

double t5_quantile(double p)
{
    static const boost::math::students_t_distribution<double> dist(5.0);
    if (p <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (p >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    return boost::math::quantile(dist, p);
}

double chi2_sf(double x, double dof)
{
    if (x <= 0.0) {
        return 1.0;
    }
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace fcsv::special
