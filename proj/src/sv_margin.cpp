#include "fcsv/sv_margin.hpp"

#include <cmath>
#include <stdexcept>

#include "fcsv/special.hpp"

namespace fcsv {

using special::normal_cdf;
using special::normal_pdf;
using special::softplus;

double MarginState::phi() const { return std::tanh(xi); }

double MarginState::sigma() const { return std::exp(psi); }

MarginState MarginState::initial(const Vec& z)
{
    const double mu = (z.array().square() + 1e-12).log().mean();
    return {mu, std::atanh(0.9), std::log(0.2), Vec::Zero(z.size() + 1)};
}

MarginSeries::MarginSeries(Vec z) : z_(std::move(z))
{
    if (z_.size() < 2) {
        throw std::invalid_argument("a margin needs at least two observations");
    }
    if (!z_.allFinite()) {
        throw std::invalid_argument("margin series contains non-finite values");
    }
}

Vec ancillary_to_natural(const MarginState& state)
{
    const double phi = state.phi();
    const double sigma = state.sigma();
    const Eigen::Index n = state.s_tilde.size();
    Vec s(n);
    // 1 / sqrt(1 - tanh(xi)^2) = cosh(xi)
    s[0] = state.mu + sigma * std::cosh(state.xi) * state.s_tilde[0];
    for (Eigen::Index t = 1; t < n; ++t) {
        s[t] = state.mu + phi * (s[t - 1] - state.mu) + sigma * state.s_tilde[t];
    }
    return s;
}

MarginState natural_to_ancillary(double mu, double xi, double psi, const Vec& s)
{
    MarginState out{mu, xi, psi, Vec(s.size())};
    const double phi = out.phi();
    const double sigma = out.sigma();
    out.s_tilde[0] = (s[0] - mu) / (sigma * std::cosh(xi));
    for (Eigen::Index t = 1; t < s.size(); ++t) {
        out.s_tilde[t] = (s[t] - mu - phi * (s[t - 1] - mu)) / sigma;
    }
    return out;
}

double log_prior_mu(double mu) { return -0.5 * mu * mu / kMuPriorVar; }

double log_prior_xi(double xi)
{
    // (1 + phi) / 2 = sigmoid(2 xi) and (1 - phi) / 2 = sigmoid(-2 xi)
    const double log_beta = std::lgamma(kPhiPriorA) + std::lgamma(kPhiPriorB) -
                            std::lgamma(kPhiPriorA + kPhiPriorB);
    return -kPhiPriorA * softplus(-2.0 * xi) - kPhiPriorB * softplus(2.0 * xi) + std::log(2.0) -
           log_beta;
}

double log_prior_psi(double psi)
{
    return 0.5 * std::log(2.0 / special::kPi) + psi - 0.5 * std::exp(2.0 * psi);
}

double log_prior_margin(const MarginState& state)
{
    return log_prior_mu(state.mu) + log_prior_xi(state.xi) + log_prior_psi(state.psi) -
           0.5 * state.s_tilde.squaredNorm();
}

namespace {

void check_shapes(const MarginState& state, const MarginSeries& series, const Vec& v)
{
    if (state.s_tilde.size() != series.size() + 1 || v.size() != series.size()) {
        throw std::invalid_argument("margin state, series and factor lengths disagree");
    }
}

bool is_independence(const BivariateCopulaSpec& link)
{
    return base_family(link.family) == CopulaFamily::Gumbel ? link.theta == 1.0 : link.theta == 0.0;
}

// Elliptical scores of the factor draws for the link (empty otherwise).
Vec factor_scores(const Vec& v, const BivariateCopulaSpec& link)
{
    if (!is_elliptical(link.family)) {
        return Vec();
    }
    return v.unaryExpr([&](double x) { return elliptical_score(link.family, x); });
}

// Elliptical score of u = Phi(x); for the Gaussian link it is x itself unless clamped.
double margin_score(const BivariateCopulaSpec& link, double x, double u)
{
    if (link.family == CopulaFamily::Gaussian && u > kUnitClamp && u < 1.0 - kUnitClamp) {
        return x;
    }
    return elliptical_score(link.family, u);
}

// Observation terms sum_t [ln c(Phi(x_t), v_t) + ln phi(x_t) - s_t / 2], t = 1..T.
double observation_loglik(const Vec& s, const MarginSeries& series, const Vec& v,
                          const Vec& v_score, const BivariateCopulaSpec& link)
{
    const bool indep = is_independence(link);
    const bool scored = v_score.size() != 0;
    double total = 0.0;
    for (Eigen::Index t = 0; t < series.size(); ++t) {
        const double st = s[t + 1];
        const double x = series.z()[t] * std::exp(-0.5 * st);
        total += special::normal_log_pdf(x) - 0.5 * st;
        if (!indep) {
            const double u = normal_cdf(x);
            total += scored ? log_density_scored(link, u, v[t], margin_score(link, x, u), v_score[t])
                            : log_density(link, u, v[t]);
        }
    }
    return total;
}

// d/ds_t of the observation terms, index 0 (the initial state) is zero.
Vec observation_grad(const Vec& s, const MarginSeries& series, const Vec& v, const Vec& v_score,
                     const BivariateCopulaSpec& link)
{
    const bool indep = is_independence(link);
    const bool scored = v_score.size() != 0;
    Vec g = Vec::Zero(s.size());
    CopulaGradient cg;
    for (Eigen::Index t = 0; t < series.size(); ++t) {
        const double x = series.z()[t] * std::exp(-0.5 * s[t + 1]);
        double gt = 0.5 * x * x - 0.5;
        if (!indep) {
            const double u = normal_cdf(x);
            if (scored) {
                log_density_and_gradient_scored(link, u, v[t], margin_score(link, x, u), v_score[t], cg);
            } else {
                log_density_and_gradient(link, u, v[t], cg);
            }
            if (u > kUnitClamp && u < 1.0 - kUnitClamp) {
                gt += cg.d_u * normal_pdf(x) * (-0.5 * x);
            }
        }
        g[t + 1] = gt;
    }
    return g;
}

// Chains d/ds into the ancillary coordinates; `full` adds (mu, xi, psi) in front.
Vec chain_to_ancillary(const MarginState& state, const Vec& s, const Vec& g, bool full)
{
    const Eigen::Index n = s.size();  // T + 1
    const double phi = state.phi();
    const double sigma = state.sigma();
    const Eigen::Index off = full ? 3 : 0;
    Vec out(off + n);

    // backward accumulation A_j = g_j + phi A_{j+1}
    double acc = 0.0;
    for (Eigen::Index j = n - 1; j >= 1; --j) {
        acc = g[j] + phi * acc;
        out[off + j] = sigma * acc - state.s_tilde[j];
    }
    out[off] = sigma * std::cosh(state.xi) * phi * acc - state.s_tilde[0];

    if (full) {
        double d_mu = 0.0;
        double d_xi = 0.0;
        double d_psi = 0.0;
        // ds_t/dmu = 1, ds_t/dpsi = s_t - mu, ds_t/dxi by forward recursion
        const double dphi_dxi = 1.0 - phi * phi;
        double ds_dxi = sigma * std::sinh(state.xi) * state.s_tilde[0];
        for (Eigen::Index t = 1; t < n; ++t) {
            ds_dxi = (s[t - 1] - state.mu) * dphi_dxi + phi * ds_dxi;
            d_mu += g[t];
            d_xi += g[t] * ds_dxi;
            d_psi += g[t] * (s[t] - state.mu);
        }
        out[0] = d_mu - state.mu / kMuPriorVar;
        out[1] = d_xi + kPhiPriorA * (1.0 - phi) - kPhiPriorB * (1.0 + phi);
        out[2] = d_psi + 1.0 - std::exp(2.0 * state.psi);
    }
    return out;
}

}  // namespace

double log_conditional(const MarginState& state, const MarginSeries& series, const Vec& v,
                       const BivariateCopulaSpec& link)
{
    check_shapes(state, series, v);
    return observation_loglik(ancillary_to_natural(state), series, v, factor_scores(v, link), link) +
           log_prior_margin(state);
}

Vec grad_log_conditional(const MarginState& state, const MarginSeries& series, const Vec& v,
                         const BivariateCopulaSpec& link)
{
    check_shapes(state, series, v);
    const Vec s = ancillary_to_natural(state);
    return chain_to_ancillary(state, s, observation_grad(s, series, v, factor_scores(v, link), link),
                              true);
}

Vec copula_scale(const MarginState& state, const MarginSeries& series)
{
    const Vec s = ancillary_to_natural(state);
    Vec u(series.size());
    for (Eigen::Index t = 0; t < series.size(); ++t) {
        u[t] = clamp_unit(normal_cdf(series.z()[t] * std::exp(-0.5 * s[t + 1])));
    }
    return u;
}

bool update_margin(MarginState& state, const MarginSeries& series, const Vec& v,
                   const BivariateCopulaSpec& link, const HmcSettings& settings, Rng& rng,
                   MarginBlock block)
{
    check_shapes(state, series, v);
    const Eigen::Index n = state.s_tilde.size();
    const Vec v_score = factor_scores(v, link);

    if (block == MarginBlock::Full) {
        auto unpack = [n](const Vec& q) { return MarginState{q[0], q[1], q[2], q.tail(n)}; };
        TargetDensity target{
            n + 3,
            [&](const Vec& q) {
                const MarginState st = unpack(q);
                return observation_loglik(ancillary_to_natural(st), series, v, v_score, link) +
                       log_prior_margin(st);
            },
            [&](const Vec& q) {
                const MarginState st = unpack(q);
                const Vec s = ancillary_to_natural(st);
                return chain_to_ancillary(st, s, observation_grad(s, series, v, v_score, link), true);
            }};
        Vec q(n + 3);
        q << state.mu, state.xi, state.psi, state.s_tilde;
        const auto step = hmc_step(q, target, settings, rng);
        if (step.accepted) {
            state = unpack(step.q);
        }
        return step.accepted;
    }

    MarginState work = state;
    TargetDensity target{
        n,
        [&](const Vec& q) {
            work.s_tilde = q;
            return observation_loglik(ancillary_to_natural(work), series, v, v_score, link) -
                   0.5 * q.squaredNorm();
        },
        [&](const Vec& q) {
            work.s_tilde = q;
            const Vec s = ancillary_to_natural(work);
            return chain_to_ancillary(work, s, observation_grad(s, series, v, v_score, link), false);
        }};
    const auto step = hmc_step(state.s_tilde, target, settings, rng);
    if (step.accepted) {
        state.s_tilde = step.q;
    }
    return step.accepted;
}

Vec simulate_log_variance(double mu, double phi, double sigma, Eigen::Index n_obs, Rng& rng)
{
    if (!(std::abs(phi) < 1.0) || !(sigma >= 0.0)) {
        throw std::invalid_argument("log-variance process needs |phi| < 1 and sigma >= 0");
    }
    Vec s(n_obs + 1);
    s[0] = mu + sigma / std::sqrt(1.0 - phi * phi) * std_normal(rng);
    for (Eigen::Index t = 1; t <= n_obs; ++t) {
        s[t] = mu + phi * (s[t - 1] - mu) + sigma * std_normal(rng);
    }
    return s;
}

}  // namespace fcsv
