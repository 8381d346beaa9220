#include <random>

#include "acceptance.hpp"
#include "fcsv/diagnostics.hpp"
#include "fcsv/forecast.hpp"
#include "fcsv/replication.hpp"

// Rolling VaR backtest on six simulated assets: train on 1000 days, forecast 500,
// 10 seeded replicates. A replicate counts as calibrated when both levels have
// violation counts inside the exact binomial 99% band and the conditional
// coverage test does not reject at 5%.

namespace acceptance {

namespace {

// LR_cc = LR_uc + LR_ind, with every log-likelihood summed day by day.
double direct_lr_cc(const std::vector<bool>& hit, double level)
{
    const double p = 1.0 - level;
    const double n = static_cast<double>(hit.size());
    double ones = 0.0;
    for (bool h : hit) {
        ones += h ? 1.0 : 0.0;
    }
    const double pi_hat = ones / n;
    double ll_p = 0.0;
    double ll_hat = 0.0;
    for (bool h : hit) {
        ll_p += std::log(h ? p : 1.0 - p);
        ll_hat += (h ? (pi_hat > 0 ? std::log(pi_hat) : 0.0) : (pi_hat < 1 ? std::log1p(-pi_hat) : 0.0));
    }
    // transition probabilities estimated from the pairs (t - 1, t)
    double from0 = 0.0, from0_to1 = 0.0, from1 = 0.0, from1_to1 = 0.0;
    for (std::size_t t = 1; t < hit.size(); ++t) {
        (hit[t - 1] ? from1 : from0) += 1.0;
        (hit[t - 1] ? from1_to1 : from0_to1) += hit[t] ? 1.0 : 0.0;
    }
    const double p01 = from0 > 0 ? from0_to1 / from0 : 0.0;
    const double p11 = from1 > 0 ? from1_to1 / from1 : 0.0;
    const double p_pairs = (from0_to1 + from1_to1) / (from0 + from1);
    double ll_markov = 0.0;
    double ll_iid = 0.0;
    for (std::size_t t = 1; t < hit.size(); ++t) {
        const double q = hit[t - 1] ? p11 : p01;
        ll_markov += hit[t] ? std::log(q) : std::log1p(-q);
        ll_iid += hit[t] ? std::log(p_pairs) : std::log1p(-p_pairs);
    }
    return -2.0 * (ll_p - ll_hat) - 2.0 * (ll_iid - ll_markov);
}

bool oracle_checks(Checklist& list)
{
    std::vector<std::vector<bool>> seqs;
    std::mt19937_64 rng(707);
    for (double rate : {0.03, 0.05, 0.1, 0.2}) {
        for (int len : {50, 250, 1000}) {
            std::bernoulli_distribution b(rate);
            std::vector<bool> h(static_cast<std::size_t>(len));
            for (auto&& x : h) {
                x = b(rng);
            }
            h[10] = h[11] = h[12] = true;  // at least one cluster
            h[20] = false;
            seqs.push_back(h);
        }
    }
    std::vector<bool> periodic(200, false);
    for (std::size_t t = 0; t < periodic.size(); t += 7) {
        periodic[t] = true;
    }
    seqs.push_back(periodic);
    double worst = 0.0;
    for (const auto& h : seqs) {
        for (double level : {0.90, 0.95, 0.99}) {
            const auto r = fcsv::christoffersen_cc(h, level);
            worst = std::max(worst, std::abs(r.lr_cc - direct_lr_cc(h, level)));
            worst = std::max(worst, std::abs(r.p_value_cc - std::exp(-0.5 * r.lr_cc)));
        }
    }
    return list.check(worst <= 1e-10,
                      fmt("Christoffersen LR_cc and p-value vs direct likelihood on %zu fixed sequences x 3 "
                          "levels: max abs diff %.1e",
                          seqs.size(), worst));
}

}  // namespace

Verdict criterion7()
{
    constexpr int kReplicates = 10;
    constexpr int kTrain = 1000;
    constexpr int kDays = 500;
    const std::vector<double> levels{0.90, 0.95};

    Checklist list;
    oracle_checks(list);

    std::vector<std::pair<int, int>> bands;
    for (double lv : levels) {
        bands.push_back(binomial_band(kDays, 1.0 - lv, 0.99));
        list.note(fmt("binomial 99%% band at %.0f%%: [%d, %d] of %d days", 100 * lv, bands.back().first,
                      bands.back().second, kDays));
    }

    const auto params = fcsv::backtest_params();
    int calibrated = 0;
    int failed_days = 0;
    double worst_lr = 0.0;
    for (int r = 0; r < kReplicates; ++r) {
        fcsv::Rng sim_rng(7000 + static_cast<std::uint64_t>(r));
        const auto sim = fcsv::simulate_joint(params, kTrain + kDays, sim_rng);
        fcsv::FitConfig config;
        config.seed = 7100 + static_cast<std::uint64_t>(r);
        fcsv::Rng rng(7200 + static_cast<std::uint64_t>(r));
        const auto vs = fcsv::rolling_backtest(sim.z, kTrain, fcsv::RollingPolicy{}, config, levels, rng);
        bool ok = vs.n_days() == kDays;
        std::string line = fmt("replicate %2d:", r + 1);
        for (std::size_t k = 0; k < levels.size(); ++k) {
            std::vector<bool> hit;
            for (Eigen::Index t = 0; t < vs.n_days(); ++t) {
                const double var = vs.var(t, static_cast<Eigen::Index>(k));
                if (!std::isfinite(var)) {
                    ++failed_days;
                    ok = false;
                    continue;
                }
                hit.push_back(vs.realized[t] < var);
            }
            const int count = static_cast<int>(std::count(hit.begin(), hit.end(), true));
            const auto rep = fcsv::christoffersen_cc(hit, levels[k]);
            worst_lr = std::max(worst_lr, std::abs(rep.lr_cc - direct_lr_cc(hit, levels[k])));
            const double p = rep.p_value_cc;
            const bool in_band = count >= bands[k].first && count <= bands[k].second;
            ok = ok && in_band && p >= 0.05;
            line += fmt("  %.0f%%: %d violations (rate %.3f%s), CC p %.3f%s", 100 * levels[k], count,
                        count / static_cast<double>(hit.size()), in_band ? "" : ", outside band", p,
                        p >= 0.05 ? "" : " rejects");
        }
        calibrated += ok ? 1 : 0;
        list.note(line + (ok ? "" : "  [not calibrated]"));
    }
    list.check(worst_lr <= 1e-10, fmt("backtest LR_cc vs direct likelihood: max abs diff %.1e", worst_lr));
    list.check(failed_days == 0, fmt("forecast days without a VaR: %d", failed_days));
    list.check(calibrated >= 8, fmt("calibrated replicates %d/10 (need >= 8)", calibrated));
    return {list.passed(), fmt("%d/10 replicates with both levels in band and CC not rejecting at 5%%",
                               calibrated)};
}

}  // namespace acceptance
