#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fcsv/bicop.hpp"
#include "fcsv/factor_copula.hpp"
#include "fcsv/hmc.hpp"
#include "fcsv/sv_margin.hpp"

// Factor copula model with stochastic volatility margins: block Gibbs sampler
// (margins, dependence, family indicators) and forward simulation.

namespace fcsv {

/// Candidate linking-copula families, ordered and without duplicates.
class FamilySet {
public:
    explicit FamilySet(std::vector<CopulaFamily> members);
    std::span<const CopulaFamily> members() const { return members_; }
    std::size_t size() const { return members_.size(); }

    /// Gaussian, Student t4, Clayton, Gumbel.
    static FamilySet base();
    /// The base set plus survival Clayton and survival Gumbel.
    static FamilySet with_survival();

private:
    std::vector<CopulaFamily> members_;
};

struct FitConfig {
    int n_iter = 2500;
    int n_burn = 500;
    FamilySet family_set = FamilySet::base();
    HmcSettings dependence_settings{0.2, 40, {}};
    HmcSettings margin_settings{0.1, 30, {}};
    std::uint64_t seed = 1;
    int threads = 1;
    /// Time indices t (1-based) whose s_tj and v_t are stored with every draw.
    std::vector<int> track_times;

    void validate() const;
};

/// T x d matrix of log returns, one margin per column.
class JointData {
public:
    explicit JointData(Eigen::MatrixXd z);
    const Eigen::MatrixXd& z() const { return z_; }
    const MarginSeries& margin(Eigen::Index j) const { return margins_[static_cast<std::size_t>(j)]; }
    Eigen::Index n_obs() const { return z_.rows(); }
    Eigen::Index dim() const { return z_.cols(); }

private:
    Eigen::MatrixXd z_;
    std::vector<MarginSeries> margins_;
};

struct JointState {
    std::vector<MarginState> margins;
    DependenceState dependence;
    std::vector<CopulaFamily> families;

    /// Per-asset crude start, delta = w = 0, all families set to the first member.
    static JointState initial(const JointData& data, const FamilySet& set);
    BivariateCopulaSpec link(Eigen::Index j) const;
};

/// Copula-scale data u_tj = Phi(z_tj exp(-s_tj / 2)) under the current margins.
Eigen::MatrixXd copula_scale(const JointState& state, const JointData& data);

/// Full conditional probabilities of m_j over the family set, in set order.
std::vector<double> family_probabilities(const Vec& u_j, const Vec& v, double delta_j,
                                         const FamilySet& set);

CopulaFamily sample_family(Eigen::Index j, const JointState& state, const Eigen::MatrixXd& u,
                           const FamilySet& set, Rng& rng);

/// Draws m_j from its full conditional (the single member for a singleton set).
CopulaFamily draw_family(const Vec& u_j, const Vec& v, double delta_j, const FamilySet& set,
                         Rng& rng);

/// Factor copula chain on fixed copula-scale data with family selection each iteration.
struct CopulaSelectionFit {
    std::vector<DependenceState> draws;
    std::vector<std::vector<CopulaFamily>> families;  ///< one vector per retained draw
};

/// Uses config.n_iter, n_burn, family_set, dependence_settings and stream 0 of config.seed.
CopulaSelectionFit fit_copula_selecting(const CopulaData& data, const FitConfig& config);

/// Random streams for one chain: one per margin plus one for the dependence block and families.
struct ChainStreams {
    std::vector<Rng> margin;
    Rng shared;

    static ChainStreams from_seed(std::uint64_t seed, Eigen::Index d);
};

/// Which blocks a sweep visits.
enum class SweepMode {
    Full,         ///< all margin coordinates, (delta, w), family indicators
    DynamicOnly,  ///< s~ per margin and w only; statics and families stay fixed
};

struct SweepStats {
    std::vector<bool> margin_accepted;
    bool dependence_accepted = false;
};

SweepStats gibbs_sweep(JointState& state, const JointData& data, const FitConfig& config,
                       ChainStreams& streams, SweepMode mode = SweepMode::Full);

struct JointDraw {
    Vec mu;
    Vec phi;
    Vec sigma;
    Vec tau;
    std::vector<CopulaFamily> families;
    Vec s_last;                    ///< s_Tj per margin
    std::vector<int> track_times;  ///< 1-based times of the tracked latents
    Eigen::MatrixXd s_tracked;     ///< rows follow track_times, one column per margin
    Vec v_tracked;

    static JointDraw from_state(const JointState& state, std::span<const int> track_times);
};

struct JointFit {
    std::vector<JointDraw> draws;
    JointState final_state;
    double margin_acceptance = 0.0;
    double dependence_acceptance = 0.0;
};

JointFit fit_joint(const JointData& data, const FitConfig& config);

/// Most frequent family of margin j across draws (ties go to the earlier family enum value).
CopulaFamily modal_family(std::span<const JointDraw> draws, Eigen::Index j);

/// Generating parameters of the joint model.
struct JointParams {
    Vec mu;
    Vec phi;
    Vec sigma;
    Vec tau;
    std::vector<CopulaFamily> families;

    Eigen::Index dim() const { return mu.size(); }
    void validate() const;
};

struct SimulatedData {
    Eigen::MatrixXd z;    ///< T x d returns
    Eigen::MatrixXd eps;  ///< T x d standardized errors
    Eigen::MatrixXd s;    ///< (T + 1) x d log variances, row 0 is s_0
    Vec v;                ///< latent factor
};

SimulatedData simulate_joint(const JointParams& params, Eigen::Index n_obs, Rng& rng);

/// Columnar draw CSV: mu_j, phi_j, sigma_j, tau_j, m_j, s_last_j, then s_<t>_<j> and v_<t>.
void write_draws_csv(std::ostream& out, std::span<const JointDraw> draws);
std::vector<JointDraw> read_draws_csv(std::istream& in);

}  // namespace fcsv
