#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fcsv/bicop.hpp"
#include "fcsv/hmc.hpp"

// Single factor copula: observed uniforms u_t1..u_td are conditionally
// independent given one latent uniform v_t, each joined to it by a linking copula.
// Parameters are sampled on the logit scale: delta_j = logit(tau_j), w_t = logit(v_t).

namespace fcsv {

struct DependenceState {
    Vec delta;  ///< length d
    Vec w;      ///< length T

    static DependenceState initial(Eigen::Index d, Eigen::Index t);
    Vec tau() const;
    Vec v() const;
};

/// T x d matrix of copula-scale observations, clamped into the open unit square.
class CopulaData {
public:
    explicit CopulaData(Eigen::MatrixXd u);
    const Eigen::MatrixXd& u() const { return u_; }
    Eigen::Index n_obs() const { return u_.rows(); }
    Eigen::Index dim() const { return u_.cols(); }

private:
    Eigen::MatrixXd u_;
};

/// Log density of the logit of a standard uniform.
double log_prior_u(double x);
double dlog_prior_u(double x);

double log_posterior(const CopulaData& data, const DependenceState& state,
                     std::span<const CopulaFamily> families);

/// Gradient ordered as (delta_1..delta_d, w_1..w_T).
Vec grad_log_posterior(const CopulaData& data, const DependenceState& state,
                       std::span<const CopulaFamily> families);

/// Which coordinates a dependence HMC step moves.
enum class DependenceBlock { Full, FactorOnly };

/// One HMC step on the dependence block. Returns true on acceptance.
bool update_dependence(const CopulaData& data, DependenceState& state,
                       std::span<const CopulaFamily> families, const HmcSettings& settings,
                       Rng& rng, DependenceBlock block = DependenceBlock::Full);

/// HMC chain started at the prior mode; returns the n_iter - n_burn retained states.
std::vector<DependenceState> fit(const CopulaData& data, std::span<const CopulaFamily> families,
                                 const HmcSettings& settings, int n_iter, int n_burn, Rng& rng);

/// Draws T observations from the factor copula: v_t ~ U(0,1), u_tj = hinv(p_tj | v_t).
/// Returns the T x d matrix of u and writes the factor draws to `v_out` if given.
Eigen::MatrixXd simulate_factor_copula(std::span<const CopulaFamily> families, const Vec& tau,
                                       Eigen::Index n_obs, Rng& rng, Vec* v_out = nullptr);

}  // namespace fcsv
