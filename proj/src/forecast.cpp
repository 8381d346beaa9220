#include "fcsv/forecast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fcsv/diagnostics.hpp"
#include "fcsv/special.hpp"

namespace fcsv {

namespace {

BivariateCopulaSpec link_from_tau(CopulaFamily fam, double tau)
{
    return {fam, theta_from_delta(fam, special::logit(tau))};
}

double mode_of(std::span<const double> xs)
{
    return kde_mode(xs);
}

CopulaFamily most_frequent(const std::vector<CopulaFamily>& fams)
{
    std::array<int, 6> counts{};
    for (auto f : fams) {
        ++counts[static_cast<std::size_t>(f)];
    }
    return static_cast<CopulaFamily>(std::max_element(counts.begin(), counts.end()) -
                                     counts.begin());
}

// keeps KDE modes inside the parameter domains
StaticParams clamp_statics(StaticParams s)
{
    constexpr double kEdge = 1e-6;
    for (Eigen::Index j = 0; j < s.dim(); ++j) {
        s.phi[j] = std::clamp(s.phi[j], -1.0 + kEdge, 1.0 - kEdge);
        s.sigma[j] = std::max(s.sigma[j], kEdge);
        s.tau[j] = std::clamp(s.tau[j], kEdge, 1.0 - kEdge);
    }
    return s;
}

void check_levels(std::span<const double> levels)
{
    if (levels.empty()) {
        throw std::invalid_argument("no VaR levels given");
    }
    for (double p : levels) {
        if (!(p > 0.0 && p < 1.0)) {
            throw std::invalid_argument("VaR levels must lie in (0, 1)");
        }
    }
}

Vec resolve_weights(const Vec& weights, Eigen::Index d)
{
    return weights.size() == 0 ? equal_weights(d) : weights;
}

std::string date_of(std::span<const std::string> dates, Eigen::Index row)
{
    return dates.empty() ? std::to_string(row + 1) : dates[static_cast<std::size_t>(row)];
}

void check_backtest_inputs(const Eigen::MatrixXd& z, int train_len, const RollingPolicy& policy,
                           std::span<const double> levels, const Vec& w,
                           std::span<const std::string> dates)
{
    policy.validate();
    check_levels(levels);
    if (!z.allFinite()) {
        throw std::invalid_argument("returns contain non-finite values");
    }
    if (train_len < policy.window || train_len >= z.rows()) {
        throw std::invalid_argument("need window <= train_len < number of rows");
    }
    if (w.size() != z.cols()) {
        throw std::invalid_argument("weights length does not match the number of assets");
    }
    if (!dates.empty() && static_cast<Eigen::Index>(dates.size()) != z.rows()) {
        throw std::invalid_argument("dates length does not match the number of rows");
    }
}

VarSeries empty_series(std::span<const double> levels, Eigen::Index n_days)
{
    VarSeries out;
    out.levels.assign(levels.begin(), levels.end());
    out.var = Eigen::MatrixXd::Constant(n_days, static_cast<Eigen::Index>(levels.size()),
                                        std::numeric_limits<double>::quiet_NaN());
    out.realized.resize(n_days);
    return out;
}

void record_day(VarSeries& out, Eigen::Index k, const ForecastSet& set, const Vec& w)
{
    for (std::size_t l = 0; l < out.levels.size(); ++l) {
        out.var(k, static_cast<Eigen::Index>(l)) = portfolio_var(set, w, out.levels[l]);
    }
}

// drop s_0, append the conditional mean of the next log variance
void shift_margin(MarginState& m)
{
    const Vec s = ancillary_to_natural(m);
    const Eigen::Index n = s.size();
    Vec next(n);
    next.head(n - 1) = s.tail(n - 1);
    next[n - 1] = m.mu + m.phi() * (s[n - 1] - m.mu);
    m = natural_to_ancillary(m.mu, m.xi, m.psi, next);
}

double realized_return(const Eigen::MatrixXd& z, Eigen::Index row, const Vec& w)
{
    return std::log((w.array() * z.row(row).transpose().array().exp()).sum());
}

}  // namespace

ForecastSet::ForecastSet(Eigen::MatrixXd draws) : draws_(std::move(draws))
{
    if (draws_.rows() < 1 || draws_.cols() < 1) {
        throw std::invalid_argument("forecast set is empty");
    }
    if (!draws_.allFinite()) {
        throw std::domain_error("forecast set contains non-finite draws");
    }
}

ForecastSet predictive_draws(std::span<const JointDraw> posterior, Rng& rng, int per_draw)
{
    if (posterior.empty()) {
        throw std::invalid_argument("posterior is empty");
    }
    if (per_draw < 1) {
        throw std::invalid_argument("per_draw must be positive");
    }
    const Eigen::Index d = posterior.front().mu.size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(posterior.size()) * per_draw, d);
    Eigen::Index r = 0;
    for (const auto& dr : posterior) {
        if (dr.mu.size() != d || dr.s_last.size() != d) {
            throw std::invalid_argument("posterior draws have inconsistent dimensions");
        }
        for (int k = 0; k < per_draw; ++k, ++r) {
            const double v = uniform01(rng);
            for (Eigen::Index j = 0; j < d; ++j) {
                const double s = dr.mu[j] + dr.phi[j] * (dr.s_last[j] - dr.mu[j]) +
                                 dr.sigma[j] * std_normal(rng);
                const auto spec = link_from_tau(dr.families[static_cast<std::size_t>(j)], dr.tau[j]);
                const double u = clamp_unit(hinv(spec, uniform01(rng), v));
                out(r, j) = special::normal_quantile(u) * std::exp(0.5 * s);
            }
        }
    }
    return ForecastSet(std::move(out));
}

Vec portfolio_returns(const ForecastSet& set, const Vec& weights)
{
    if (weights.size() != set.dim()) {
        throw std::invalid_argument("weights length does not match the forecast dimension");
    }
    if (std::abs(weights.sum() - 1.0) > 1e-9 || (weights.array() < 0.0).any()) {
        throw std::invalid_argument("weights must be nonnegative and sum to 1");
    }
    Vec out(set.r_count());
    for (Eigen::Index r = 0; r < set.r_count(); ++r) {
        // log-sum-exp around the largest weighted term
        const Eigen::ArrayXd a = set.draws().row(r).transpose().array() + weights.array().log();
        const double top = a.maxCoeff();
        out[r] = top + std::log((a - top).exp().sum());
    }
    return out;
}

double portfolio_var(const ForecastSet& set, const Vec& weights, double level)
{
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("level must lie in (0, 1)");
    }
    const Vec pr = portfolio_returns(set, weights);
    return empirical_quantile(std::span<const double>(pr.data(), static_cast<std::size_t>(pr.size())),
                              1.0 - level);
}

Vec equal_weights(Eigen::Index d)
{
    if (d < 1) {
        throw std::invalid_argument("dimension must be positive");
    }
    return Vec::Constant(d, 1.0 / static_cast<double>(d));
}

StaticParams StaticParams::from_posterior(std::span<const JointDraw> draws)
{
    if (draws.empty()) {
        throw std::invalid_argument("no draws");
    }
    const Eigen::Index d = draws.front().mu.size();
    StaticParams out{Vec(d), Vec(d), Vec(d), Vec(d), {}};
    std::vector<double> buf(draws.size());
    auto mode_at = [&](auto field, Eigen::Index j) {
        for (std::size_t i = 0; i < draws.size(); ++i) {
            buf[i] = field(draws[i])[j];
        }
        return mode_of(buf);
    };
    for (Eigen::Index j = 0; j < d; ++j) {
        out.mu[j] = mode_at([](const JointDraw& x) -> const Vec& { return x.mu; }, j);
        out.phi[j] = mode_at([](const JointDraw& x) -> const Vec& { return x.phi; }, j);
        out.sigma[j] = mode_at([](const JointDraw& x) -> const Vec& { return x.sigma; }, j);
        out.tau[j] = mode_at([](const JointDraw& x) -> const Vec& { return x.tau; }, j);
        out.families.push_back(modal_family(draws, j));
    }
    return clamp_statics(std::move(out));
}

void RollingPolicy::validate() const
{
    if (window < 2) {
        throw std::invalid_argument("window must be at least 2");
    }
    if (refresh_burn < 0 || refresh_iters <= refresh_burn) {
        throw std::invalid_argument("need refresh_iters > refresh_burn >= 0");
    }
    if (per_draw < 1) {
        throw std::invalid_argument("per_draw must be positive");
    }
}

std::vector<bool> VarSeries::violations(std::size_t k) const
{
    std::vector<bool> out;
    for (std::size_t i = 0; i < n_days(); ++i) {
        const double var_i = var(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        if (failures[i].empty() && std::isfinite(var_i)) {
            out.push_back(realized[static_cast<Eigen::Index>(i)] < var_i);
        }
    }
    return out;
}

void VarSeries::validate() const
{
    const auto n = static_cast<Eigen::Index>(dates.size());
    if (realized.size() != n || var.rows() != n ||
        var.cols() != static_cast<Eigen::Index>(levels.size()) ||
        failures.size() != dates.size()) {
        throw std::invalid_argument("VaR series fields are not aligned");
    }
    check_levels(levels);
}

JointState window_state(const JointState& fitted, const StaticParams& statics, int window)
{
    const auto d = static_cast<Eigen::Index>(fitted.margins.size());
    if (statics.dim() != d) {
        throw std::invalid_argument("statics dimension does not match the state");
    }
    const Eigen::Index t_len = fitted.dependence.w.size();
    if (window < 2 || window > t_len) {
        throw std::invalid_argument("window must lie in [2, T]");
    }
    JointState out;
    for (Eigen::Index j = 0; j < d; ++j) {
        const Vec s = ancillary_to_natural(fitted.margins[static_cast<std::size_t>(j)]);
        out.margins.push_back(natural_to_ancillary(statics.mu[j], std::atanh(statics.phi[j]),
                                                   std::log(statics.sigma[j]),
                                                   s.tail(window + 1)));
    }
    out.dependence.delta = statics.tau.unaryExpr([](double t) { return special::logit(t); });
    out.dependence.w = fitted.dependence.w.tail(window);
    out.families = statics.families;
    return out;
}

void shift_window(JointState& state)
{
    for (auto& m : state.margins) {
        shift_margin(m);
    }
    Vec& w = state.dependence.w;
    const Eigen::Index n = w.size();
    Vec next(n);
    next.head(n - 1) = w.tail(n - 1);
    next[n - 1] = 0.0;
    w = std::move(next);
}

VarSeries rolling_backtest(const Eigen::MatrixXd& z, int train_len, const RollingPolicy& policy,
                           const FitConfig& config, std::span<const double> levels, Rng& rng,
                           const Vec& weights, std::span<const std::string> dates)
{
    config.validate();
    const Vec w = resolve_weights(weights, z.cols());
    check_backtest_inputs(z, train_len, policy, levels, w, dates);

    const JointData train(z.topRows(train_len));
    FitConfig train_config = config;
    train_config.track_times.clear();
    const JointFit fit = fit_joint(train, train_config);
    const StaticParams statics = StaticParams::from_posterior(fit.draws);

    const Eigen::Index n_days = z.rows() - train_len;
    VarSeries out = empty_series(levels, n_days);
    JointState state = window_state(fit.final_state, statics, policy.window);
    ChainStreams streams = ChainStreams::from_seed(config.seed + 0x5bd1e995ULL, z.cols());
    std::vector<JointDraw> draws;
    draws.reserve(static_cast<std::size_t>(policy.refresh_iters - policy.refresh_burn));

    for (Eigen::Index k = 0; k < n_days; ++k) {
        const Eigen::Index row = train_len + k;
        out.dates.push_back(date_of(dates, row));
        out.realized[k] = realized_return(z, row, w);
        out.failures.emplace_back();
        try {
            const JointData window(z.middleRows(row - policy.window, policy.window));
            draws.clear();
            for (int it = 0; it < policy.refresh_iters; ++it) {
                gibbs_sweep(state, window, config, streams, SweepMode::DynamicOnly);
                if (it >= policy.refresh_burn) {
                    draws.push_back(JointDraw::from_state(state, {}));
                }
            }
            record_day(out, k, predictive_draws(draws, rng, policy.per_draw), w);
        } catch (const std::exception& e) {
            out.failures.back() = e.what();
        }
        out.statics.push_back(StaticParams{Vec(state.margins.size()), Vec(state.margins.size()),
                                           Vec(state.margins.size()), state.dependence.tau(),
                                           state.families});
        auto& rec = out.statics.back();
        for (std::size_t j = 0; j < state.margins.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            rec.mu[jj] = state.margins[j].mu;
            rec.phi[jj] = state.margins[j].phi();
            rec.sigma[jj] = state.margins[j].sigma();
        }
        shift_window(state);
    }
    return out;
}

Vec TwoStepModel::s_next() const
{
    return statics.mu.array() + statics.phi.array() * (s_last - statics.mu).array();
}

TwoStepModel two_step_fit(const Eigen::MatrixXd& z, const FitConfig& config)
{
    config.validate();
    const JointData data(z);
    const Eigen::Index t_len = data.n_obs();
    const Eigen::Index d = data.dim();
    const auto n_keep = static_cast<std::size_t>(config.n_iter - config.n_burn);
    ChainStreams streams = ChainStreams::from_seed(config.seed, d);

    TwoStepModel model;
    model.statics = StaticParams{Vec(d), Vec(d), Vec(d), Vec(d), {}};
    model.s_hat.resize(t_len, d);
    model.s_last.resize(d);
    model.pit.resize(t_len, d);

    const BivariateCopulaSpec independence{CopulaFamily::Gaussian, 0.0};
    const Vec v_unused = Vec::Constant(t_len, 0.5);
    for (Eigen::Index j = 0; j < d; ++j) {
        const MarginSeries& series = data.margin(j);
        MarginState st = MarginState::initial(series.z());
        std::vector<double> mu, phi, sigma;
        Eigen::MatrixXd paths(t_len, static_cast<Eigen::Index>(n_keep));
        for (int it = 0; it < config.n_iter; ++it) {
            update_margin(st, series, v_unused, independence, config.margin_settings,
                          streams.margin[static_cast<std::size_t>(j)]);
            if (it >= config.n_burn) {
                const auto col = static_cast<Eigen::Index>(mu.size());
                mu.push_back(st.mu);
                phi.push_back(st.phi());
                sigma.push_back(st.sigma());
                paths.col(col) = ancillary_to_natural(st).tail(t_len);
            }
        }
        model.statics.mu[j] = mode_of(mu);
        model.statics.phi[j] = mode_of(phi);
        model.statics.sigma[j] = mode_of(sigma);
        std::vector<double> row(n_keep);
        for (Eigen::Index t = 0; t < t_len; ++t) {
            Eigen::Map<Vec>(row.data(), static_cast<Eigen::Index>(n_keep)) = paths.row(t).transpose();
            model.s_hat(t, j) = mode_of(row);
            model.pit(t, j) = clamp_unit(
                special::normal_cdf(series.z()[t] * std::exp(-0.5 * model.s_hat(t, j))));
        }
        model.s_last[j] = model.s_hat(t_len - 1, j);
    }

    FitConfig copula_config = config;
    copula_config.seed = make_stream(config.seed, static_cast<std::uint64_t>(d) + 1)();
    const CopulaSelectionFit cfit = fit_copula_selecting(CopulaData(model.pit), copula_config);
    std::vector<double> taus(cfit.draws.size());
    std::vector<CopulaFamily> fams(cfit.draws.size());
    for (Eigen::Index j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < cfit.draws.size(); ++i) {
            taus[i] = special::sigmoid(cfit.draws[i].delta[j]);
            fams[i] = cfit.families[i][static_cast<std::size_t>(j)];
        }
        model.statics.tau[j] = mode_of(taus);
        model.statics.families.push_back(most_frequent(fams));
    }
    model.statics = clamp_statics(std::move(model.statics));
    return model;
}

ForecastSet two_step_predictive(const TwoStepModel& model, Eigen::Index r_count, Rng& rng)
{
    if (r_count < 1) {
        throw std::invalid_argument("r_count must be positive");
    }
    const Eigen::Index d = model.statics.dim();
    const Vec scale = (0.5 * model.s_next().array()).exp();
    std::vector<BivariateCopulaSpec> links;
    for (Eigen::Index j = 0; j < d; ++j) {
        links.push_back(link_from_tau(model.statics.families[static_cast<std::size_t>(j)],
                                      model.statics.tau[j]));
    }
    Eigen::MatrixXd out(r_count, d);
    for (Eigen::Index r = 0; r < r_count; ++r) {
        const double v = uniform01(rng);
        for (Eigen::Index j = 0; j < d; ++j) {
            const double u = clamp_unit(hinv(links[static_cast<std::size_t>(j)], uniform01(rng), v));
            out(r, j) = special::normal_quantile(u) * scale[j];
        }
    }
    return ForecastSet(std::move(out));
}

VarSeries rolling_backtest_two_step(const Eigen::MatrixXd& z, int train_len,
                                    const RollingPolicy& policy, const FitConfig& config,
                                    std::span<const double> levels, Rng& rng, const Vec& weights,
                                    std::span<const std::string> dates)
{
    config.validate();
    const Vec w = resolve_weights(weights, z.cols());
    check_backtest_inputs(z, train_len, policy, levels, w, dates);

    TwoStepModel model = two_step_fit(z.topRows(train_len), config);
    const StaticParams& st = model.statics;
    const Eigen::Index d = z.cols();
    const Eigen::Index n_days = z.rows() - train_len;
    VarSeries out = empty_series(levels, n_days);

    // window paths start from the two-step modes of s over the last window points
    std::vector<MarginState> margins;
    for (Eigen::Index j = 0; j < d; ++j) {
        Vec s(policy.window + 1);
        s.tail(policy.window) = model.s_hat.col(j).tail(policy.window);
        s[0] = train_len > policy.window ? model.s_hat(train_len - policy.window - 1, j) : st.mu[j];
        margins.push_back(
            natural_to_ancillary(st.mu[j], std::atanh(st.phi[j]), std::log(st.sigma[j]), s));
    }
    ChainStreams streams = ChainStreams::from_seed(config.seed + 0x5bd1e995ULL, d);
    const BivariateCopulaSpec independence{CopulaFamily::Gaussian, 0.0};
    const Vec v_unused = Vec::Constant(policy.window, 0.5);
    const auto r_count =
        static_cast<Eigen::Index>(policy.refresh_iters - policy.refresh_burn) * policy.per_draw;
    std::vector<double> s_draws;

    for (Eigen::Index k = 0; k < n_days; ++k) {
        const Eigen::Index row = train_len + k;
        out.dates.push_back(date_of(dates, row));
        out.realized[k] = realized_return(z, row, w);
        out.failures.emplace_back();
        try {
            for (Eigen::Index j = 0; j < d; ++j) {
                const MarginSeries series(z.col(j).segment(row - policy.window, policy.window));
                auto& m = margins[static_cast<std::size_t>(j)];
                s_draws.clear();
                for (int it = 0; it < policy.refresh_iters; ++it) {
                    update_margin(m, series, v_unused, independence, config.margin_settings,
                                  streams.margin[static_cast<std::size_t>(j)],
                                  MarginBlock::LatentOnly);
                    if (it >= policy.refresh_burn) {
                        s_draws.push_back(ancillary_to_natural(m)[policy.window]);
                    }
                }
                model.s_last[j] = s_draws.size() >= 30 ? mode_of(s_draws) : s_draws.back();
            }
            record_day(out, k, two_step_predictive(model, r_count, rng), w);
        } catch (const std::exception& e) {
            out.failures.back() = e.what();
        }
        out.statics.push_back(st);
        for (auto& m : margins) {
            shift_margin(m);
        }
    }
    return out;
}

}  // namespace fcsv
