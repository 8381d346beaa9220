#include "acceptance.hpp"
#include "fcsv/factor_copula.hpp"
#include "fcsv/hmc.hpp"
#include "fcsv/sv_margin.hpp"

namespace acceptance {

namespace {

using fcsv::CopulaFamily;
using fcsv::Vec;

// |H(end) - H(start)| for unit mass.
double energy_error(const fcsv::TargetDensity& target, const Vec& q, const Vec& p, double eps, double time)
{
    const int steps = static_cast<int>(std::lround(time / eps));
    const auto end = fcsv::leapfrog(q, p, eps, steps, target, Vec());
    const double h0 = -target.log_density(q) + 0.5 * p.squaredNorm();
    const double h1 = -target.log_density(end.q) + 0.5 * end.p.squaredNorm();
    return std::abs(h1 - h0);
}

}  // namespace

Verdict criterion8()
{
    Checklist list;
    fcsv::Rng rng(808);

    // dependence block target
    const std::vector<CopulaFamily> fams = {CopulaFamily::Gaussian, CopulaFamily::StudentT4, CopulaFamily::Clayton,
                                            CopulaFamily::Gumbel, CopulaFamily::SurvivalGumbel};
    const fcsv::CopulaData data(fcsv::simulate_factor_copula(fams, Vec{{0.3, 0.4, 0.5, 0.6, 0.7}}, 200, rng));
    fcsv::DependenceState dep = fcsv::DependenceState::initial(5, 200);
    // move into the bulk first
    for (int i = 0; i < 300; ++i) {
        fcsv::update_dependence(data, dep, fams, {0.2, 40, {}}, rng);
    }
    const fcsv::HmcSettings tiny{1e-3, 10, {}};
    int acc_dep = 0;
    for (int i = 0; i < 1000; ++i) {
        acc_dep += fcsv::update_dependence(data, dep, fams, tiny, rng) ? 1 : 0;
    }
    list.check(acc_dep >= 990, fmt("dependence block at eps <= 1e-3: %d/1000 accepted", acc_dep));

    // margin block target
    const Vec s = fcsv::simulate_log_variance(-7.0, 0.9, 0.3, 300, rng);
    Vec z(300);
    Vec v(300);
    for (Eigen::Index t = 0; t < 300; ++t) {
        z[t] = std::exp(0.5 * s[t + 1]) * fcsv::std_normal(rng);
        v[t] = 0.02 + 0.96 * fcsv::uniform01(rng);
    }
    const fcsv::MarginSeries series(z);
    const fcsv::BivariateCopulaSpec link{CopulaFamily::Clayton, 1.5};
    fcsv::MarginState ms = fcsv::MarginState::initial(z);
    for (int i = 0; i < 300; ++i) {
        fcsv::update_margin(ms, series, v, link, {0.1, 30, {}}, rng);
    }
    int acc_margin = 0;
    for (int i = 0; i < 1000; ++i) {
        acc_margin += fcsv::update_margin(ms, series, v, link, tiny, rng) ? 1 : 0;
    }
    list.check(acc_margin >= 990, fmt("margin block at eps <= 1e-3: %d/1000 accepted", acc_margin));

    // second-order energy error
    const fcsv::TargetDensity normal2{2, [](const Vec& q) { return -0.5 * q.squaredNorm(); },
                                      [](const Vec& q) -> Vec { return -q; }};
    const Vec q0{{1.0, -0.5}};
    const Vec p0{{0.3, 0.8}};
    for (double eps : {0.1, 0.05, 0.02}) {
        const double ratio = energy_error(normal2, q0, p0, eps, 1.3) / energy_error(normal2, q0, p0, eps / 2, 1.3);
        list.check(ratio >= 3.0 && ratio <= 5.0,
                   fmt("standard normal, eps %.3f -> %.3f: energy error ratio %.3f in [3, 5]", eps, eps / 2, ratio));
    }
    const Eigen::Index nd = 5 + 200;
    const fcsv::TargetDensity dep_target{
        nd,
        [&](const Vec& q) { return fcsv::log_posterior(data, {q.head(5), q.tail(200)}, fams); },
        [&](const Vec& q) { return fcsv::grad_log_posterior(data, {q.head(5), q.tail(200)}, fams); }};
    Vec qd(nd);
    qd << dep.delta, dep.w;
    Vec pd(nd);
    for (auto& x : pd) {
        x = fcsv::std_normal(rng);
    }
    const double ratio_dep = energy_error(dep_target, qd, pd, 0.01, 0.2) / energy_error(dep_target, qd, pd, 0.005, 0.2);
    list.check(ratio_dep >= 3.0 && ratio_dep <= 5.0,
               fmt("dependence block, eps 0.010 -> 0.005: energy error ratio %.3f in [3, 5]", ratio_dep));

    // standard normal moments
    const fcsv::TargetDensity normal1{1, [](const Vec& q) { return -0.5 * q.squaredNorm(); },
                                      [](const Vec& q) -> Vec { return -q; }};
    Vec q = Vec::Zero(1);
    double sum = 0.0;
    double sum_sq = 0.0;
    constexpr int kSteps = 50000;
    for (int i = 0; i < kSteps; ++i) {
        q = fcsv::hmc_step(q, normal1, {0.2, 40, {}}, rng).q;
        sum += q[0];
        sum_sq += q[0] * q[0];
    }
    const double m = sum / kSteps;
    const double var = sum_sq / kSteps - m * m;
    list.check(std::abs(m) <= 0.05, fmt("standard normal mean over %d steps: %.4f (|.| <= 0.05)", kSteps, m));
    list.check(std::abs(var - 1.0) <= 0.1, fmt("standard normal variance: %.4f (|. - 1| <= 0.1)", var));

    return {list.passed(), fmt("acceptance %d/1000 and %d/1000, energy ratios in [3, 5], mean %.3f, var %.3f",
                               acc_dep, acc_margin, m, var)};
}

}  // namespace acceptance
