#include "fcsv/factor_copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fcsv/special.hpp"

namespace fcsv {

using special::sigmoid;
using special::softplus;

DependenceState DependenceState::initial(Eigen::Index d, Eigen::Index t)
{
    return {Vec::Zero(d), Vec::Zero(t)};
}

Vec DependenceState::tau() const
{
    return delta.unaryExpr([](double x) { return sigmoid(x); });
}

Vec DependenceState::v() const
{
    return w.unaryExpr([](double x) { return sigmoid(x); });
}

CopulaData::CopulaData(Eigen::MatrixXd u) : u_(std::move(u))
{
    if (u_.rows() < 1 || u_.cols() < 2) {
        throw std::invalid_argument("copula data needs T >= 1 rows and d >= 2 columns");
    }
    if (!u_.allFinite()) {
        throw std::invalid_argument("copula data contains non-finite values");
    }
    u_ = u_.unaryExpr([](double x) { return clamp_unit(x); });
}

double log_prior_u(double x)
{
    return -2.0 * softplus(-x) - x;
}

double dlog_prior_u(double x)
{
    return 2.0 * sigmoid(-x) - 1.0;
}

namespace {

void check_shapes(const CopulaData& data, const DependenceState& state,
                  std::span<const CopulaFamily> families)
{
    if (state.delta.size() != data.dim() || static_cast<Eigen::Index>(families.size()) != data.dim()) {
        throw std::invalid_argument("dependence state and families must match the data dimension");
    }
    if (state.w.size() != data.n_obs()) {
        throw std::invalid_argument("factor vector must match the number of observations");
    }
}

// Elliptical scores of the data, one column per margin (unused columns left NaN).
Eigen::MatrixXd data_scores(const CopulaData& data, std::span<const CopulaFamily> families)
{
    Eigen::MatrixXd su(data.n_obs(), data.dim());
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        for (Eigen::Index t = 0; t < data.n_obs(); ++t) {
            su(t, j) = elliptical_score(families[j], data.u()(t, j));
        }
    }
    return su;
}

// Factor scores for the Gaussian (column 0) and t4 (column 1) families when needed.
Eigen::MatrixX2d factor_scores(const Vec& v, std::span<const CopulaFamily> families)
{
    const bool need_n = std::find(families.begin(), families.end(), CopulaFamily::Gaussian) != families.end();
    const bool need_t = std::find(families.begin(), families.end(), CopulaFamily::StudentT4) != families.end();
    Eigen::MatrixX2d sv(v.size(), 2);
    for (Eigen::Index t = 0; t < v.size(); ++t) {
        sv(t, 0) = need_n ? elliptical_score(CopulaFamily::Gaussian, v[t]) : 0.0;
        sv(t, 1) = need_t ? elliptical_score(CopulaFamily::StudentT4, v[t]) : 0.0;
    }
    return sv;
}

int score_column(CopulaFamily family) { return family == CopulaFamily::StudentT4 ? 1 : 0; }

// Far out in delta the link parameter rounds onto the boundary (rho == 1, theta == inf).
// The density there is degenerate, so a trajectory reaching it is a divergence.
bool saturated(const BivariateCopulaSpec& spec) { return !theta_in_domain(spec.family, spec.theta); }

// Copula part only; the priors are added by the callers.
double copula_loglik(const CopulaData& data, const Eigen::MatrixXd& su, const Vec& delta,
                     const Vec& v, std::span<const CopulaFamily> families)
{
    const auto& u = data.u();
    const Eigen::MatrixX2d sv = factor_scores(v, families);
    double total = 0.0;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        const BivariateCopulaSpec spec{families[j], theta_from_delta(families[j], delta[j])};
        if (saturated(spec)) {
            return -std::numeric_limits<double>::infinity();
        }
        const int c = score_column(families[j]);
        for (Eigen::Index t = 0; t < data.n_obs(); ++t) {
            total += log_density_scored(spec, u(t, j), v[t], su(t, j), sv(t, c));
        }
    }
    return total;
}

// Copula part of the gradient w.r.t. theta_j (not yet chained) and v_t.
void copula_grad(const CopulaData& data, const Eigen::MatrixXd& su, const Vec& delta,
                 const Vec& v, std::span<const CopulaFamily> families, Vec& g_theta, Vec& g_v)
{
    const auto& u = data.u();
    const Eigen::MatrixX2d sv = factor_scores(v, families);
    g_theta.setZero(data.dim());
    g_v.setZero(data.n_obs());
    CopulaGradient g;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        const BivariateCopulaSpec spec{families[j], theta_from_delta(families[j], delta[j])};
        if (saturated(spec)) {
            g_theta.setConstant(std::numeric_limits<double>::quiet_NaN());
            return;
        }
        const int c = score_column(families[j]);
        double acc = 0.0;
        for (Eigen::Index t = 0; t < data.n_obs(); ++t) {
            log_density_and_gradient_scored(spec, u(t, j), v[t], su(t, j), sv(t, c), g);
            acc += g.d_theta;
            g_v[t] += g.d_v;
        }
        g_theta[j] = acc;
    }
}

double prior_sum(const Vec& x)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        s += log_prior_u(x[i]);
    }
    return s;
}

}  // namespace

double log_posterior(const CopulaData& data, const DependenceState& state,
                     std::span<const CopulaFamily> families)
{
    check_shapes(data, state, families);
    return copula_loglik(data, data_scores(data, families), state.delta, state.v(), families) +
           prior_sum(state.w) + prior_sum(state.delta);
}

Vec grad_log_posterior(const CopulaData& data, const DependenceState& state,
                       std::span<const CopulaFamily> families)
{
    check_shapes(data, state, families);
    const Eigen::Index d = data.dim();
    const Eigen::Index n = data.n_obs();
    Vec g_theta;
    Vec g_v;
    copula_grad(data, data_scores(data, families), state.delta, state.v(), families, g_theta, g_v);
    Vec out(d + n);
    for (Eigen::Index j = 0; j < d; ++j) {
        out[j] = g_theta[j] * dtheta_ddelta(families[j], state.delta[j]) +
                 dlog_prior_u(state.delta[j]);
    }
    for (Eigen::Index t = 0; t < n; ++t) {
        const double w = state.w[t];
        out[d + t] = g_v[t] * sigmoid(w) * sigmoid(-w) + dlog_prior_u(w);
    }
    return out;
}

bool update_dependence(const CopulaData& data, DependenceState& state,
                       std::span<const CopulaFamily> families, const HmcSettings& settings,
                       Rng& rng, DependenceBlock block)
{
    check_shapes(data, state, families);
    const Eigen::Index d = data.dim();
    const Eigen::Index n = data.n_obs();

    const Eigen::MatrixXd su = data_scores(data, families);
    if (block == DependenceBlock::Full) {
        TargetDensity target{
            d + n,
            [&](const Vec& q) {
                const Vec w = q.tail(n);
                const Vec v = w.unaryExpr([](double x) { return sigmoid(x); });
                return copula_loglik(data, su, q.head(d), v, families) + prior_sum(w) +
                       prior_sum(q.head(d));
            },
            [&](const Vec& q) {
                const Vec delta = q.head(d);
                const Vec w = q.tail(n);
                const Vec v = w.unaryExpr([](double x) { return sigmoid(x); });
                Vec g_theta;
                Vec g_v;
                copula_grad(data, su, delta, v, families, g_theta, g_v);
                Vec out(d + n);
                for (Eigen::Index j = 0; j < d; ++j) {
                    out[j] = g_theta[j] * dtheta_ddelta(families[j], delta[j]) +
                             dlog_prior_u(delta[j]);
                }
                for (Eigen::Index t = 0; t < n; ++t) {
                    out[d + t] = g_v[t] * v[t] * (1.0 - v[t]) + dlog_prior_u(w[t]);
                }
                return out;
            }};
        Vec q(d + n);
        q << state.delta, state.w;
        const auto step = hmc_step(q, target, settings, rng);
        if (step.accepted) {
            state.delta = step.q.head(d);
            state.w = step.q.tail(n);
        }
        return step.accepted;
    }

    // delta fixed: only the factor terms and the w prior vary
    const Vec delta = state.delta;
    TargetDensity target{
        n,
        [&](const Vec& w) {
            const Vec v = w.unaryExpr([](double x) { return sigmoid(x); });
            return copula_loglik(data, su, delta, v, families) + prior_sum(w);
        },
        [&](const Vec& w) {
            const Vec v = w.unaryExpr([](double x) { return sigmoid(x); });
            Vec g_theta;
            Vec g_v;
            copula_grad(data, su, delta, v, families, g_theta, g_v);
            Vec out(n);
            for (Eigen::Index t = 0; t < n; ++t) {
                out[t] = g_v[t] * v[t] * (1.0 - v[t]) + dlog_prior_u(w[t]);
            }
            return out;
        }};
    const auto step = hmc_step(state.w, target, settings, rng);
    if (step.accepted) {
        state.w = step.q;
    }
    return step.accepted;
}

std::vector<DependenceState> fit(const CopulaData& data, std::span<const CopulaFamily> families,
                                 const HmcSettings& settings, int n_iter, int n_burn, Rng& rng)
{
    if (n_burn < 0 || n_iter <= n_burn) {
        throw std::invalid_argument("need n_iter > n_burn >= 0");
    }
    settings.validate(data.dim() + data.n_obs());
    DependenceState state = DependenceState::initial(data.dim(), data.n_obs());
    check_shapes(data, state, families);
    std::vector<DependenceState> chain;
    chain.reserve(static_cast<std::size_t>(n_iter - n_burn));
    for (int it = 0; it < n_iter; ++it) {
        update_dependence(data, state, families, settings, rng);
        if (it >= n_burn) {
            chain.push_back(state);
        }
    }
    return chain;
}

Eigen::MatrixXd simulate_factor_copula(std::span<const CopulaFamily> families, const Vec& tau,
                                       Eigen::Index n_obs, Rng& rng, Vec* v_out)
{
    const auto d = static_cast<Eigen::Index>(families.size());
    if (tau.size() != d) {
        throw std::invalid_argument("one tau per linking copula expected");
    }
    std::vector<BivariateCopulaSpec> specs;
    for (Eigen::Index j = 0; j < d; ++j) {
        specs.push_back({families[j], tau_to_theta(families[j], KendallTau(tau[j]))});
    }
    Eigen::MatrixXd u(n_obs, d);
    Vec v(n_obs);
    for (Eigen::Index t = 0; t < n_obs; ++t) {
        v[t] = uniform01(rng);
        for (Eigen::Index j = 0; j < d; ++j) {
            u(t, j) = hinv(specs[j], uniform01(rng), v[t]);
        }
    }
    if (v_out != nullptr) {
        *v_out = v;
    }
    return u;
}

}  // namespace fcsv
