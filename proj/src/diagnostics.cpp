#include "fcsv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fcsv/special.hpp"

namespace fcsv {

namespace {

double mean_of(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

std::vector<double> sorted_copy(std::span<const double> x)
{
    std::vector<double> out(x.begin(), x.end());
    std::sort(out.begin(), out.end());
    return out;
}

double quantile_sorted(const std::vector<double>& xs, double p)
{
    const double h = (static_cast<double>(xs.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= xs.size()) {
        return xs.back();
    }
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[lo + 1] - xs[lo]);
}

// x ln y with 0 ln 0 = 0
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

EssResult effective_sample_size(std::span<const double> chain)
{
    const std::size_t n = chain.size();
    if (n < 10) {
        throw std::invalid_argument("effective sample size needs at least 10 draws");
    }
    const double m = mean_of(chain);
    auto autocov = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) {
            s += (chain[i] - m) * (chain[i + k] - m);
        }
        return s / static_cast<double>(n - k);
    };
    const double c0 = autocov(0);
    const auto nd = static_cast<double>(n);
    if (!(c0 > 0.0)) {
        return {nd, true};
    }
    // sum of the initial positive pairs Gamma_m = rho_{2m} + rho_{2m+1}, made monotone
    double pair_sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    bool any_pair = false;
    for (std::size_t k = 0; k + 1 < n - 1; k += 2) {
        double pair = (autocov(k) + autocov(k + 1)) / c0;
        if (!(pair > 0.0)) {
            break;
        }
        pair = std::min(pair, prev);
        prev = pair;
        pair_sum += pair;
        any_pair = true;
    }
    if (!any_pair) {
        return {0.0, true};
    }
    const double tau = -1.0 + 2.0 * pair_sum;
    if (tau <= 1.0) {
        return {nd, false};
    }
    return {nd / tau, false};
}

double silverman_bandwidth(std::span<const double> chain)
{
    const auto xs = sorted_copy(chain);
    const double n = static_cast<double>(xs.size());
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = quantile_sorted(xs, 0.75) - quantile_sorted(xs, 0.25);
    double lo = std::min(sd, iqr / 1.34);
    if (!(lo > 0.0)) {
        lo = sd > 0.0 ? sd : (xs.front() != 0.0 ? std::abs(xs.front()) : 1.0);
    }
    return 0.9 * lo * std::pow(n, -0.2);
}

double kde_mode(std::span<const double> chain)
{
    if (chain.size() < 30) {
        throw std::invalid_argument("kernel density mode needs at least 30 draws");
    }
    const auto xs = sorted_copy(chain);
    if (xs.front() == xs.back()) {
        return xs.front();
    }
    const double bw = silverman_bandwidth(xs);
    const double lo = xs.front() - 3.0 * bw;
    const double hi = xs.back() + 3.0 * bw;
    constexpr int kGrid = 512;
    constexpr double kCut = 8.0;  // kernel contributions beyond 8 bandwidths are below 1e-14
    double best_x = lo;
    double best_f = -1.0;
    for (int g = 0; g < kGrid; ++g) {
        const double x = lo + (hi - lo) * g / (kGrid - 1);
        const auto first = std::lower_bound(xs.begin(), xs.end(), x - kCut * bw);
        const auto last = std::upper_bound(first, xs.end(), x + kCut * bw);
        double f = 0.0;
        for (auto it = first; it != last; ++it) {
            const double r = (x - *it) / bw;
            f += std::exp(-0.5 * r * r);
        }
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }
    return best_x;
}

double empirical_quantile(std::span<const double> values, double p)
{
    if (values.empty()) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("quantile probability must lie in [0, 1]");
    }
    return quantile_sorted(sorted_copy(values), p);
}

Interval credible_interval(std::span<const double> chain, double level)
{
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("credible level must lie in (0, 1)");
    }
    const auto xs = sorted_copy(chain);
    return {quantile_sorted(xs, 0.5 * (1.0 - level)), quantile_sorted(xs, 0.5 * (1.0 + level))};
}

ChainSummary summarize_chain(std::span<const double> chain, std::span<const double> levels)
{
    ChainSummary out;
    const auto ess = effective_sample_size(chain);
    out.ess = ess.ess;
    out.ess_degenerate = ess.degenerate;
    out.mode = kde_mode(chain);
    out.mean = mean_of(chain);
    for (double level : levels) {
        out.levels.push_back(level);
        out.intervals.push_back(credible_interval(chain, level));
    }
    return out;
}

BacktestReport christoffersen_cc(const std::vector<bool>& violations, double level)
{
    if (violations.size() < 10) {
        throw std::invalid_argument("coverage test needs at least 10 days");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("VaR level must lie in (0, 1)");
    }
    BacktestReport r;
    r.level = level;
    r.n_days = static_cast<int>(violations.size());
    r.violations = static_cast<int>(std::count(violations.begin(), violations.end(), true));
    const double n1 = r.violations;
    const double n0 = r.n_days - r.violations;
    r.rate = n1 / r.n_days;
    const double p = 1.0 - level;
    r.lr_uc = -2.0 * (xlogy(n0, 1.0 - p) + xlogy(n1, p) - xlogy(n0, 1.0 - r.rate) - xlogy(n1, r.rate));

    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::size_t t = 1; t < violations.size(); ++t) {
        const bool prev = violations[t - 1];
        const bool cur = violations[t];
        (prev ? (cur ? n11 : n10) : (cur ? n01 : n00)) += 1.0;
    }
    r.degenerate = (n00 + n01 == 0.0) || (n10 + n11 == 0.0);
    const double pi01 = n00 + n01 > 0.0 ? n01 / (n00 + n01) : 0.0;
    const double pi11 = n10 + n11 > 0.0 ? n11 / (n10 + n11) : 0.0;
    const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);
    const double ll_null = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi);
    const double ll_alt =
        xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11);
    r.lr_ind = -2.0 * (ll_null - ll_alt);
    r.lr_cc = r.lr_uc + r.lr_ind;
    r.p_value_cc = special::chi2_sf(std::max(r.lr_cc, 0.0), 2.0);
    return r;
}

std::vector<ParameterScore> score_against_truth(std::span<const ChainSummary> summaries,
                                                std::span<const double> truths, double ci_level)
{
    if (summaries.size() != truths.size()) {
        throw std::invalid_argument("one truth per summarized parameter expected");
    }
    std::vector<ParameterScore> out;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        const auto it = std::find(s.levels.begin(), s.levels.end(), ci_level);
        if (it == s.levels.end()) {
            throw std::invalid_argument("summary lacks an interval at the requested level");
        }
        const auto& ci = s.intervals[static_cast<std::size_t>(it - s.levels.begin())];
        const double dev = s.mode - truths[i];
        out.push_back({std::abs(dev), dev * dev, ci.low <= truths[i] && truths[i] <= ci.high});
    }
    return out;
}

ScoreAverages average_scores(std::span<const ParameterScore> scores)
{
    ScoreAverages a;
    if (scores.empty()) {
        return a;
    }
    for (const auto& s : scores) {
        a.mad += s.abs_dev;
        a.mse += s.sq_err;
        a.coverage += s.covered ? 1.0 : 0.0;
    }
    const auto n = static_cast<double>(scores.size());
    a.mad /= n;
    a.mse /= n;
    a.coverage /= n;
    return a;
}

void write_summary_csv(std::ostream& out, std::span<const std::string> names,
                       std::span<const ChainSummary> summaries)
{
    if (names.size() != summaries.size()) {
        throw std::invalid_argument("one name per summary expected");
    }
    out << "parameter,mode,mean,ess,ess_degenerate";
    const auto& levels = summaries.empty() ? std::vector<double>{} : summaries.front().levels;
    for (double level : levels) {
        out << ",ci" << std::lround(level * 100) << "_low,ci" << std::lround(level * 100) << "_high";
    }
    out << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& s = summaries[i];
        out << names[i] << ',' << s.mode << ',' << s.mean << ',' << s.ess << ','
            << (s.ess_degenerate ? 1 : 0);
        for (const auto& ci : s.intervals) {
            out << ',' << ci.low << ',' << ci.high;
        }
        out << '\n';
    }
}

void write_backtest_csv(std::ostream& out, std::span<const BacktestReport> reports)
{
    out << "level,n_days,violations,rate,lr_uc,lr_ind,lr_cc,p_value_cc,degenerate\n"
        << std::setprecision(17);
    for (const auto& r : reports) {
        out << r.level << ',' << r.n_days << ',' << r.violations << ',' << r.rate << ',' << r.lr_uc
            << ',' << r.lr_ind << ',' << r.lr_cc << ',' << r.p_value_cc << ','
            << (r.degenerate ? 1 : 0) << '\n';
    }
}

void to_json(nlohmann::json& j, const Interval& x) { j = {{"low", x.low}, {"high", x.high}}; }

void to_json(nlohmann::json& j, const ChainSummary& x)
{
    j = {{"ess", x.ess},       {"ess_degenerate", x.ess_degenerate}, {"mode", x.mode},
         {"mean", x.mean},     {"levels", x.levels},                 {"intervals", x.intervals}};
}

void to_json(nlohmann::json& j, const BacktestReport& x)
{
    j = {{"level", x.level}, {"n_days", x.n_days}, {"violations", x.violations},
         {"rate", x.rate},   {"lr_uc", x.lr_uc},   {"lr_ind", x.lr_ind},
         {"lr_cc", x.lr_cc}, {"p_value_cc", x.p_value_cc}, {"degenerate", x.degenerate}};
}

void to_json(nlohmann::json& j, const ParameterScore& x)
{
    j = {{"abs_dev", x.abs_dev}, {"sq_err", x.sq_err}, {"covered", x.covered}};
}

void to_json(nlohmann::json& j, const ScoreAverages& x)
{
    j = {{"mad", x.mad}, {"mse", x.mse}, {"coverage", x.coverage}};
}

}  // namespace fcsv
