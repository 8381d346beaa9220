#include "fcsv/hmc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fcsv {

void HmcSettings::validate(Eigen::Index dim) const
{
    if (!(eps_max > 0.0) || !std::isfinite(eps_max)) {
        throw std::invalid_argument("HMC eps_max must be positive");
    }
    if (l_max < 1) {
        throw std::invalid_argument("HMC l_max must be at least 1");
    }
    if (mass_diag.size() != 0) {
        if (mass_diag.size() != dim) {
            throw std::invalid_argument("HMC mass diagonal has wrong dimension");
        }
        if (!(mass_diag.array() > 0.0).all()) {
            throw std::invalid_argument("HMC mass diagonal must be positive");
        }
    }
}

PhasePoint leapfrog(const Vec& q0, const Vec& p0, double eps, int l, const TargetDensity& target,
                    const Vec& mass_diag)
{
    PhasePoint out{q0, p0};
    const bool unit_mass = mass_diag.size() == 0;
    Vec grad = target.gradient(out.q);
    if (!grad.allFinite()) {
        out.q.setConstant(std::numeric_limits<double>::quiet_NaN());
        return out;
    }
    out.p += 0.5 * eps * grad;
    for (int step = 1; step <= l; ++step) {
        if (unit_mass) {
            out.q += eps * out.p;
        } else {
            out.q += eps * out.p.cwiseQuotient(mass_diag);
        }
        grad = target.gradient(out.q);
        if (!grad.allFinite()) {
            out.q.setConstant(std::numeric_limits<double>::quiet_NaN());
            return out;
        }
        out.p += (step == l ? 0.5 : 1.0) * eps * grad;
    }
    return out;
}

namespace {

double kinetic(const Vec& p, const Vec& mass_diag)
{
    if (mass_diag.size() == 0) {
        return 0.5 * p.squaredNorm();
    }
    return 0.5 * p.cwiseProduct(p).cwiseQuotient(mass_diag).sum();
}

}  // namespace

HmcStep hmc_step(const Vec& q, const TargetDensity& target, const HmcSettings& settings, Rng& rng)
{
    return hmc_step(q, target.log_density(q), target, settings, rng);
}

HmcStep hmc_step(const Vec& q, double current_log_density, const TargetDensity& target,
                 const HmcSettings& settings, Rng& rng)
{
    const Eigen::Index dim = q.size();
    Vec p(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double z = std_normal(rng);
        p[i] = settings.mass_diag.size() == 0 ? z : z * std::sqrt(settings.mass_diag[i]);
    }
    const double eps = settings.eps_max * uniform01(rng);
    const int l = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(settings.l_max));
    const double u = uniform01(rng);

    HmcStep result{q, false, current_log_density, eps, l};
    if (!std::isfinite(current_log_density)) {
        return result;
    }
    const double h0 = -current_log_density + kinetic(p, settings.mass_diag);
    const PhasePoint end = leapfrog(q, p, eps, l, target, settings.mass_diag);
    if (!end.q.allFinite()) {
        return result;
    }
    const double proposal_ld = target.log_density(end.q);
    const double h1 = -proposal_ld + kinetic(end.p, settings.mass_diag);
    if (!std::isfinite(h1)) {
        return result;
    }
    if (std::log(u) < h0 - h1) {
        result.q = end.q;
        result.accepted = true;
        result.log_density = proposal_ld;
    }
    return result;
}

}  // namespace fcsv
