#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

// MCMC chain summaries and VaR backtest statistics.

namespace fcsv {

struct EssResult {
    double ess = 0.0;
    /// Constant chain (ess = N by convention) or no positive autocorrelation pair (ess = 0).
    bool degenerate = false;
};

/// Geyer initial monotone positive sequence estimator, capped at N.
EssResult effective_sample_size(std::span<const double> chain);

/// Silverman's rule of thumb 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> chain);

/// Argmax of a Gaussian kernel density estimate on 512 grid points over range +- 3 bandwidths.
double kde_mode(std::span<const double> chain);

/// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::span<const double> values, double p);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Equal-tailed interval between the (1 - level) / 2 and (1 + level) / 2 quantiles.
Interval credible_interval(std::span<const double> chain, double level);

struct ChainSummary {
    double ess = 0.0;
    bool ess_degenerate = false;
    double mode = 0.0;
    double mean = 0.0;
    std::vector<double> levels;
    std::vector<Interval> intervals;  ///< one per level
};

ChainSummary summarize_chain(std::span<const double> chain, std::span<const double> levels);

struct BacktestReport {
    double level = 0.0;
    int n_days = 0;
    int violations = 0;
    double rate = 0.0;
    double lr_uc = 0.0;
    double lr_ind = 0.0;
    double lr_cc = 0.0;
    double p_value_cc = 1.0;
    bool degenerate = false;  ///< some transition state never visited
};

/// Christoffersen conditional coverage test for VaR at `level` (expected violation rate 1 - level).
BacktestReport christoffersen_cc(const std::vector<bool>& violations, double level);

struct ParameterScore {
    double abs_dev = 0.0;
    double sq_err = 0.0;
    bool covered = false;
};

/// Scores each summary's mode against its truth; coverage uses the interval at `ci_level`.
std::vector<ParameterScore> score_against_truth(std::span<const ChainSummary> summaries,
                                                std::span<const double> truths, double ci_level);

struct ScoreAverages {
    double mad = 0.0;
    double mse = 0.0;
    double coverage = 0.0;
};

ScoreAverages average_scores(std::span<const ParameterScore> scores);

void write_summary_csv(std::ostream& out, std::span<const std::string> names,
                       std::span<const ChainSummary> summaries);
void write_backtest_csv(std::ostream& out, std::span<const BacktestReport> reports);

void to_json(nlohmann::json& j, const Interval& x);
void to_json(nlohmann::json& j, const ChainSummary& x);
void to_json(nlohmann::json& j, const BacktestReport& x);
void to_json(nlohmann::json& j, const ParameterScore& x);
void to_json(nlohmann::json& j, const ScoreAverages& x);

}  // namespace fcsv
