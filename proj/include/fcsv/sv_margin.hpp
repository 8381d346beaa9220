#pragma once

#include <Eigen/Dense>

#include "fcsv/bicop.hpp"
#include "fcsv/hmc.hpp"

// Stochastic volatility margin z_t = exp(s_t / 2) eps_t with AR(1) log-variance,
// sampled in the ancillary parameterization
//   s_0 = mu + sigma s~_0 / sqrt(1 - phi^2),  s_t = mu + phi (s_{t-1} - mu) + sigma s~_t
// with phi = tanh(xi), sigma = exp(psi) and s~ a priori iid N(0, 1).

namespace fcsv {

struct MarginState {
    double mu = 0.0;
    double xi = 0.0;
    double psi = 0.0;
    Vec s_tilde;  ///< length T + 1 (index 0 is the initial state)

    double phi() const;
    double sigma() const;

    /// Crude start: mu from the mean of ln z^2, phi = 0.9, sigma = 0.2, s~ = 0.
    static MarginState initial(const Vec& z);
};

/// Observed log returns of one asset.
class MarginSeries {
public:
    explicit MarginSeries(Vec z);
    const Vec& z() const { return z_; }
    Eigen::Index size() const { return z_.size(); }

private:
    Vec z_;
};

/// Log-variance path s_0..s_T.
Vec ancillary_to_natural(const MarginState& state);
MarginState natural_to_ancillary(double mu, double xi, double psi, const Vec& s);

// Prior constants for (phi + 1) / 2 ~ Beta(a, b).
inline constexpr double kPhiPriorA = 5.0;
inline constexpr double kPhiPriorB = 1.5;
inline constexpr double kMuPriorVar = 100.0;

double log_prior_mu(double mu);
double log_prior_xi(double xi);
double log_prior_psi(double psi);
double log_prior_margin(const MarginState& state);

/// Log full conditional of one margin given factor draws v_1..v_T and its linking copula.
double log_conditional(const MarginState& state, const MarginSeries& series, const Vec& v,
                       const BivariateCopulaSpec& link);

/// Gradient ordered as (mu, xi, psi, s~_0, ..., s~_T).
Vec grad_log_conditional(const MarginState& state, const MarginSeries& series, const Vec& v,
                         const BivariateCopulaSpec& link);

/// u_t = Phi(z_t exp(-s_t / 2)), clamped into the open unit interval.
Vec copula_scale(const MarginState& state, const MarginSeries& series);

/// Which coordinates a margin HMC step moves.
enum class MarginBlock { Full, LatentOnly };

/// One HMC step on the margin block. Returns true on acceptance.
bool update_margin(MarginState& state, const MarginSeries& series, const Vec& v,
                   const BivariateCopulaSpec& link, const HmcSettings& settings, Rng& rng,
                   MarginBlock block = MarginBlock::Full);

/// Stationary AR(1) log-variance path s_0..s_T.
Vec simulate_log_variance(double mu, double phi, double sigma, Eigen::Index n_obs, Rng& rng);

}  // namespace fcsv
