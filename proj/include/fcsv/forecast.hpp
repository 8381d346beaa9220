#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fcsv/joint_sampler.hpp"

// One-day-ahead predictive simulation, rolling VaR backtests and the two-step baseline.

namespace fcsv {

/// R simulated next-day log-return vectors, one per row.
class ForecastSet {
public:
    explicit ForecastSet(Eigen::MatrixXd draws);
    const Eigen::MatrixXd& draws() const { return draws_; }
    Eigen::Index r_count() const { return draws_.rows(); }
    Eigen::Index dim() const { return draws_.cols(); }

private:
    Eigen::MatrixXd draws_;
};

/// per_draw predictive vectors for every posterior draw, in draw order.
ForecastSet predictive_draws(std::span<const JointDraw> posterior, Rng& rng, int per_draw = 1);

/// ln(sum_j w_j exp(z_rj)) per draw.
Vec portfolio_returns(const ForecastSet& set, const Vec& weights);

/// Empirical (1 - level)-quantile of the portfolio returns.
double portfolio_var(const ForecastSet& set, const Vec& weights, double level);

/// Equal weights 1/d.
Vec equal_weights(Eigen::Index d);

/// Posterior-mode snapshot of (mu, phi, sigma, tau, m).
struct StaticParams {
    Vec mu;
    Vec phi;
    Vec sigma;
    Vec tau;
    std::vector<CopulaFamily> families;

    Eigen::Index dim() const { return mu.size(); }
    /// KDE modes of the continuous statics, most frequent family per margin.
    static StaticParams from_posterior(std::span<const JointDraw> draws);

    friend bool operator==(const StaticParams&, const StaticParams&) = default;
};

struct RollingPolicy {
    int window = 100;
    int refresh_iters = 300;
    int refresh_burn = 100;
    /// Predictive vectors per retained refresh draw (200 retained x 10 = 2000 by default).
    int per_draw = 10;

    void validate() const;
};

/// Daily VaR forecasts and realized portfolio returns.
struct VarSeries {
    std::vector<std::string> dates;
    std::vector<double> levels;
    Eigen::MatrixXd var;  ///< days x levels, NaN on failed days
    Vec realized;
    std::vector<std::string> failures;  ///< empty string on successful days
    std::vector<StaticParams> statics;  ///< frozen statics recorded per day

    std::size_t n_days() const { return dates.size(); }
    /// Violation flags at level index k over successful days.
    std::vector<bool> violations(std::size_t k) const;
    void validate() const;
};

/// Window state for the first forecast day: statics fixed at their modes, latent
/// path and factors taken from the last `window` time points of a fitted state.
JointState window_state(const JointState& fitted, const StaticParams& statics, int window);

/// Advances a window state by one day: drops the oldest time point and appends
/// s = mu + phi (s_last - mu) and w = 0.
void shift_window(JointState& state);

/// Fits on the first train_len rows, freezes the statics and forecasts every later row.
/// weights empty means equal weights; dates empty means 1-based row numbers.
VarSeries rolling_backtest(const Eigen::MatrixXd& z, int train_len, const RollingPolicy& policy,
                           const FitConfig& config, std::span<const double> levels, Rng& rng,
                           const Vec& weights = Vec(), std::span<const std::string> dates = {});

/// Two-step baseline: SV margins fitted separately, then a factor copula on the
/// probability integral transforms.
struct TwoStepModel {
    StaticParams statics;
    Vec s_last;            ///< posterior-mode s_T per margin
    Eigen::MatrixXd pit;   ///< T x d copula-scale data
    Eigen::MatrixXd s_hat; ///< T x d posterior-mode log variances s_1..s_T

    /// Mode of the one-step log-variance predictive: mu + phi (s_T - mu).
    Vec s_next() const;
};

TwoStepModel two_step_fit(const Eigen::MatrixXd& z, const FitConfig& config);

/// Factor copula draws at the frozen dependence, scaled by exp(s_next / 2).
ForecastSet two_step_predictive(const TwoStepModel& model, Eigen::Index r_count, Rng& rng);

/// Two-step analogue of rolling_backtest: statics frozen from two_step_fit on the
/// training rows; each day the margins' latent paths are refreshed over the window
/// with independence links and s_T is set to its posterior mode.
VarSeries rolling_backtest_two_step(const Eigen::MatrixXd& z, int train_len,
                                    const RollingPolicy& policy, const FitConfig& config,
                                    std::span<const double> levels, Rng& rng,
                                    const Vec& weights = Vec(),
                                    std::span<const std::string> dates = {});

}  // namespace fcsv
