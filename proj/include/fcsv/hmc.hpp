#pragma once

#include <functional>

#include <Eigen/Dense>

#include "fcsv/random.hpp"

// Plain Hamiltonian Monte Carlo with a randomized step size and path length.

namespace fcsv {

using Vec = Eigen::VectorXd;

struct HmcSettings {
    double eps_max = 0.2;  ///< step size drawn uniformly on (0, eps_max)
    int l_max = 40;        ///< path length drawn uniformly on {1, ..., l_max}
    Vec mass_diag;         ///< diagonal of the mass matrix; empty means identity

    /// Throws std::invalid_argument unless eps_max > 0, l_max >= 1 and the
    /// mass diagonal is empty or positive with length `dim`.
    void validate(Eigen::Index dim) const;
};

struct TargetDensity {
    Eigen::Index dim = 0;
    std::function<double(const Vec&)> log_density;
    std::function<Vec(const Vec&)> gradient;
};

struct PhasePoint {
    Vec q;
    Vec p;
};

/// `l` Leapfrog steps of size `eps` for the potential U(q) = -log_density(q).
/// Stops early, leaving non-finite entries, once a gradient is non-finite.
PhasePoint leapfrog(const Vec& q, const Vec& p, double eps, int l, const TargetDensity& target,
                    const Vec& mass_diag);

struct HmcStep {
    Vec q;
    bool accepted = false;
    double log_density = 0.0;  ///< log density at the returned q
    double eps = 0.0;
    int path_length = 0;
};

/// One HMC transition. Draw order from `rng`: momentum, step size, path length,
/// then the acceptance uniform.
HmcStep hmc_step(const Vec& q, const TargetDensity& target, const HmcSettings& settings, Rng& rng);
HmcStep hmc_step(const Vec& q, double current_log_density, const TargetDensity& target,
                 const HmcSettings& settings, Rng& rng);

}  // namespace fcsv
