#include "fcsv/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "fcsv/factor_copula.hpp"
#include "fcsv/sv_margin.hpp"
#include "fcsv/special.hpp"

namespace fcsv {

namespace {

constexpr CopulaFamily kFamilies[] = {CopulaFamily::Gaussian,        CopulaFamily::StudentT4,
                                      CopulaFamily::Clayton,         CopulaFamily::Gumbel,
                                      CopulaFamily::SurvivalClayton, CopulaFamily::SurvivalGumbel};

double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-2});
}

double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

// Largest componentwise error of `grad` against central differences of f around x.
double worst_component(const std::function<double(const Vec&)>& f, const Vec& x, const Vec& grad,
                       double h)
{
    double worst = 0.0;
    Vec y = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        y[k] = x[k] + h;
        const double up = f(y);
        y[k] = x[k] - h;
        const double down = f(y);
        y[k] = x[k];
        worst = std::max(worst, rel_err((up - down) / (2.0 * h), grad[k]));
    }
    return worst;
}

GradCheckCase copula_case(CopulaFamily fam, const GradCheckOptions& opt, Rng& rng)
{
    constexpr Eigen::Index d = 3;
    constexpr Eigen::Index t_len = 12;
    const std::vector<CopulaFamily> fams(d, fam);
    GradCheckCase out{"factor_copula/" + std::string(family_name(fam)), opt.points, 0.0, false};
    for (int p = 0; p < opt.points; ++p) {
        Eigen::MatrixXd u(t_len, d);
        for (auto& x : u.reshaped()) {
            x = uniform(rng, 0.02, 0.98);
        }
        const CopulaData data(u);
        Vec x(d + t_len);
        for (Eigen::Index k = 0; k < d; ++k) {
            x[k] = special::logit(uniform(rng, 0.1, 0.8));
        }
        for (Eigen::Index k = d; k < x.size(); ++k) {
            x[k] = uniform(rng, -2.5, 2.5);
        }
        auto state = [&](const Vec& q) { return DependenceState{q.head(d), q.tail(t_len)}; };
        auto f = [&](const Vec& q) { return log_posterior(data, state(q), fams); };
        out.max_rel_err = std::max(
            out.max_rel_err,
            worst_component(f, x, grad_log_posterior(data, state(x), fams), opt.step));
    }
    out.passed = std::isfinite(out.max_rel_err) && out.max_rel_err <= opt.tolerance;
    return out;
}

GradCheckCase margin_case(std::optional<CopulaFamily> fam, const GradCheckOptions& opt, Rng& rng)
{
    constexpr Eigen::Index t_len = 15;
    GradCheckCase out{"sv_margin/" + (fam ? std::string(family_name(*fam)) : std::string("independence")),
                      opt.points, 0.0, false};
    for (int p = 0; p < opt.points; ++p) {
        MarginState st{uniform(rng, -8.0, -6.0), std::atanh(uniform(rng, 0.5, 0.95)),
                       std::log(uniform(rng, 0.1, 0.5)), Vec(t_len + 1)};
        for (auto& x : st.s_tilde) {
            x = std_normal(rng);
        }
        const Vec s = ancillary_to_natural(st);
        Vec z(t_len);
        Vec v(t_len);
        for (Eigen::Index t = 0; t < t_len; ++t) {
            z[t] = std::exp(0.5 * s[t + 1]) * std_normal(rng);
            v[t] = uniform(rng, 0.05, 0.95);
        }
        const MarginSeries series(z);
        BivariateCopulaSpec link{CopulaFamily::Gaussian, 0.0};
        if (fam) {
            link = {*fam, tau_to_theta(*fam, KendallTau(uniform(rng, 0.1, 0.8)))};
        }
        auto unpack = [&](const Vec& q) { return MarginState{q[0], q[1], q[2], q.tail(t_len + 1)}; };
        Vec x(t_len + 4);
        x << st.mu, st.xi, st.psi, st.s_tilde;
        auto f = [&](const Vec& q) { return log_conditional(unpack(q), series, v, link); };
        out.max_rel_err = std::max(
            out.max_rel_err,
            worst_component(f, x, grad_log_conditional(st, series, v, link), opt.step));
    }
    out.passed = std::isfinite(out.max_rel_err) && out.max_rel_err <= opt.tolerance;
    return out;
}

}  // namespace

std::vector<GradCheckCase> run_gradient_checks(const GradCheckOptions& options)
{
    if (options.points < 1 || !(options.step > 0.0) || !(options.tolerance > 0.0)) {
        throw std::invalid_argument("gradient check needs points >= 1, step > 0, tolerance > 0");
    }
    Rng rng = make_stream(options.seed, 0);
    std::vector<GradCheckCase> out;
    for (auto fam : kFamilies) {
        out.push_back(copula_case(fam, options, rng));
    }
    for (auto fam : kFamilies) {
        out.push_back(margin_case(fam, options, rng));
    }
    out.push_back(margin_case(std::nullopt, options, rng));
    return out;
}

}  // namespace fcsv
