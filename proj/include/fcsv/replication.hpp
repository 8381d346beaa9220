#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fcsv/diagnostics.hpp"
#include "fcsv/joint_sampler.hpp"

// Simulation scenario presets and the replication harness that scores repeated
// fits against the generating values.

namespace fcsv {

enum class Scenario { LowTau, HighTau, MixedTau, Scenario1, Scenario2 };

std::string_view scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);

/// Low/high/mixed tau: copula-only data with Gumbel links.
bool is_copula_scenario(Scenario s);
Eigen::Index scenario_n_obs(Scenario s);

struct CopulaScenario {
    Vec tau;
    std::vector<CopulaFamily> families;
};

CopulaScenario copula_scenario(Scenario s);
JointParams joint_scenario(Scenario s);

/// Six-asset parameters used for backtest calibration runs.
JointParams backtest_params();

/// Per-parameter accumulation over replicates.
struct ParameterStudy {
    std::string name;
    std::vector<ParameterScore> at90;  ///< one per replicate, coverage of the 90% interval
    std::vector<ParameterScore> at95;
    std::vector<double> ess;

    double mse() const;
    double mad() const;
    double coverage90() const;
    double coverage95() const;
    double mean_ess() const;
};

struct StudyOptions {
    int replicates = 20;
    int n_iter = 11000;
    int n_burn = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    HmcSettings dependence_settings{0.2, 40, {}};
    HmcSettings margin_settings{0.1, 30, {}};
    FamilySet family_set = FamilySet::base();
};

/// Repeated factor copula fits (families known) on one of the tau scenarios.
struct CopulaStudy {
    Scenario scenario = Scenario::HighTau;
    StudyOptions options;
    std::vector<ParameterStudy> tau;  ///< one per margin
    std::vector<ParameterStudy> v;    ///< one per time point
    double seconds = 0.0;             ///< total sampling wall time

    ScoreAverages tau_averages(double level) const;
    ScoreAverages v_averages(double level) const;
    /// Mean ESS of tau and v per minute of sampling.
    double tau_ess_per_minute() const;
    double v_ess_per_minute() const;
};

CopulaStudy run_copula_study(Scenario scenario, const StudyOptions& options);

/// Latent times reported for the joint scenarios (1-based).
inline constexpr int kTrackedS = 300;
inline const std::vector<int> kTrackedV{100, 200, 500, 800, 900};

/// Repeated joint fits with family selection on Scenario 1 or 2.
struct JointStudy {
    Scenario scenario = Scenario::Scenario1;
    StudyOptions options;
    std::vector<ParameterStudy> params;  ///< mu, phi, sigma, tau per margin, then s_300_j, v_t
    std::vector<std::vector<CopulaFamily>> selected;  ///< posterior-mode families per replicate
    std::vector<CopulaFamily> true_families;

    const ParameterStudy& find(const std::string& name) const;
    /// Replicates whose modal family for margin j is the generating one.
    int family_hits(std::size_t j) const;
};

JointStudy run_joint_study(Scenario scenario, const StudyOptions& options);

/// A published value next to its replicated counterpart.
struct ComparisonRow {
    std::string quantity;
    double replicated = 0.0;
    std::optional<double> reference;
};

std::vector<ComparisonRow> compare(const CopulaStudy& study);
std::vector<ComparisonRow> compare(const JointStudy& study);

void write_comparison_markdown(std::ostream& out, const std::string& title,
                               const std::vector<ComparisonRow>& rows);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace fcsv
