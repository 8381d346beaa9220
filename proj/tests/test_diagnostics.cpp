#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <doctest.h>

#include "fcsv/diagnostics.hpp"
#include "fcsv/random.hpp"

namespace {

std::vector<double> normal_draws(std::size_t n, double mean, double sd, fcsv::Rng& rng)
{
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    return x;
}

// Log-likelihoods accumulated day by day, without transition counts.
double direct_lr_cc(const std::vector<bool>& hit, double level)
{
    const double p = 1.0 - level;
    const double n = static_cast<double>(hit.size());
    double n1 = 0;
    for (bool h : hit) n1 += h ? 1 : 0;
    const double pi_hat = n1 / n;
    double ll_p = 0, ll_hat = 0;
    for (bool h : hit) {
        ll_p += std::log(h ? p : 1 - p);
        ll_hat += std::log(h ? pi_hat : 1 - pi_hat);
    }
    // first-order Markov fit on transitions
    double from0 = 0, from0_to1 = 0, from1 = 0, from1_to1 = 0;
    for (std::size_t t = 1; t < hit.size(); ++t) {
        if (hit[t - 1]) {
            from1 += 1;
            from1_to1 += hit[t] ? 1 : 0;
        } else {
            from0 += 1;
            from0_to1 += hit[t] ? 1 : 0;
        }
    }
    const double p01 = from0_to1 / from0;
    const double p11 = from1_to1 / from1;
    const double p_pool = (from0_to1 + from1_to1) / (from0 + from1);
    double ll_markov = 0, ll_pool = 0;
    for (std::size_t t = 1; t < hit.size(); ++t) {
        const double q = hit[t - 1] ? p11 : p01;
        ll_markov += std::log(hit[t] ? q : 1 - q);
        ll_pool += std::log(hit[t] ? p_pool : 1 - p_pool);
    }
    return -2 * (ll_p - ll_hat) - 2 * (ll_pool - ll_markov);
}

}  // namespace

TEST_CASE("ESS of iid and AR(1) chains")
{
    fcsv::Rng rng(1);
    const auto iid = normal_draws(10000, 0, 1, rng);
    const auto e = fcsv::effective_sample_size(iid);
    CHECK(e.ess >= 9000);
    CHECK(e.ess <= 10000);
    CHECK_FALSE(e.degenerate);

    std::vector<double> ar(20000);
    double x = 0;
    std::normal_distribution<double> n01;
    for (auto& v : ar) {
        x = 0.9 * x + std::sqrt(1 - 0.81) * n01(rng);
        v = x;
    }
    const double expected = 20000.0 / 19.0;
    CHECK(std::abs(fcsv::effective_sample_size(ar).ess - expected) < 0.2 * expected);
}

TEST_CASE("ESS degenerate inputs")
{
    std::vector<double> alternating(1000);
    for (std::size_t i = 0; i < alternating.size(); ++i) alternating[i] = i % 2 == 0 ? 1.0 : -1.0;
    const auto a = fcsv::effective_sample_size(alternating);
    CHECK(std::isfinite(a.ess));
    CHECK(a.ess >= 0.0);
    CHECK(a.ess < 10.0);
    CHECK(a.degenerate);

    const std::vector<double> constant(50, 2.5);
    const auto c = fcsv::effective_sample_size(constant);
    CHECK(c.ess == 50.0);
    CHECK(c.degenerate);
    CHECK_THROWS_AS(fcsv::effective_sample_size(std::vector<double>(5, 1.0)), std::invalid_argument);
}

TEST_CASE("KDE mode")
{
    fcsv::Rng rng(2);
    // noise-free N(3, 1) sample: the exact quantiles at (i - 1/2) / n
    std::vector<double> strat(20000);
    for (std::size_t i = 0; i < strat.size(); ++i) {
        strat[i] = 3.0 + std::sqrt(2.0) * boost::math::erf_inv(2.0 * (i + 0.5) / 20000.0 - 1.0);
    }
    CHECK(std::abs(fcsv::kde_mode(strat) - 3.0) < 0.01);

    // random chains: the estimator's own sampling sd is about 0.08 at n = 20000
    double mode_sum = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        const auto x = normal_draws(20000, 3.0, 1.0, rng);
        const double m = fcsv::kde_mode(x);
        CHECK(std::abs(m - 3.0) < 0.25);
        mode_sum += m;
    }
    CHECK(std::abs(mode_sum / 5 - 3.0) < 0.1);
    CHECK(fcsv::kde_mode(std::vector<double>(40, -1.25)) == -1.25);

    auto mix = normal_draws(7000, 0.0, 0.1, rng);
    const auto far = normal_draws(3000, 5.0, 0.1, rng);
    mix.insert(mix.end(), far.begin(), far.end());
    CHECK(std::abs(fcsv::kde_mode(mix)) < 0.1);
}

TEST_CASE("quantiles and credible intervals")
{
    const std::vector<double> x = {4, 1, 3, 2};
    CHECK(fcsv::empirical_quantile(x, 0.0) == 1.0);
    CHECK(fcsv::empirical_quantile(x, 1.0) == 4.0);
    CHECK(fcsv::empirical_quantile(x, 0.5) == doctest::Approx(2.5));
    CHECK(fcsv::empirical_quantile(x, 0.1) == doctest::Approx(1.3));

    fcsv::Rng rng(3);
    std::vector<double> u(50000);
    for (auto& v : u) v = fcsv::uniform01(rng);
    const auto ci = fcsv::credible_interval(u, 0.9);
    CHECK(std::abs(ci.low - 0.05) < 0.01);
    CHECK(std::abs(ci.high - 0.95) < 0.01);

    const auto wide = fcsv::credible_interval(u, 1.0 - 1e-12);
    CHECK(wide.low == doctest::Approx(*std::min_element(u.begin(), u.end())).epsilon(1e-6));
    CHECK(wide.high == doctest::Approx(*std::max_element(u.begin(), u.end())).epsilon(1e-6));

    const auto y = normal_draws(777, 0, 2, rng);
    const auto c90 = fcsv::credible_interval(y, 0.9);
    const auto c95 = fcsv::credible_interval(y, 0.95);
    CHECK(c95.low <= c90.low);
    CHECK(c90.high <= c95.high);
}

TEST_CASE("Christoffersen test on the null-exact sequence")
{
    // 100 days, 10 isolated violations: rate 0.1 and both transition rates 0.1
    std::vector<bool> hit(100, false);
    for (int t = 0; t < 100; t += 10) hit[t] = true;
    const auto r = fcsv::christoffersen_cc(hit, 0.90);
    CHECK(r.violations == 10);
    CHECK(r.lr_uc == doctest::Approx(0.0));
    CHECK(r.lr_ind > 0.0);  // violations never follow each other here

    // 25 of each transition, so p01 = p11 = 1/2, and the level matches the rate 50/101
    std::vector<bool> h2;
    for (int k = 0; k < 25; ++k) {
        for (bool b : {false, false, true, true}) h2.push_back(b);
    }
    h2.push_back(false);
    const auto r2 = fcsv::christoffersen_cc(h2, 1.0 - 50.0 / 101.0);
    CHECK(r2.lr_uc == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r2.lr_ind == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r2.p_value_cc == doctest::Approx(1.0));
}

TEST_CASE("Christoffersen statistic matches the direct likelihood evaluation")
{
    fcsv::Rng rng(250);
    std::vector<bool> hit(250);
    for (auto&& h : hit) h = fcsv::uniform01(rng) < 0.07;
    // force some clustering
    hit[100] = hit[101] = hit[102] = true;
    const auto r = fcsv::christoffersen_cc(hit, 0.95);
    CHECK(std::abs(r.lr_cc - direct_lr_cc(hit, 0.95)) < 1e-10);
    CHECK(std::abs(r.lr_cc - r.lr_uc - r.lr_ind) < 1e-12);
}

TEST_CASE("Christoffersen statistic depends only on counts")
{
    const std::vector<bool> a = {0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0};
    const std::vector<bool> b = {0, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0};
    const auto ra = fcsv::christoffersen_cc(a, 0.9);
    const auto rb = fcsv::christoffersen_cc(b, 0.9);
    CHECK(ra.lr_cc == doctest::Approx(rb.lr_cc).epsilon(1e-14));
    CHECK(ra.p_value_cc == doctest::Approx(rb.p_value_cc).epsilon(1e-14));
}

TEST_CASE("Christoffersen degenerate sequences")
{
    const auto none = fcsv::christoffersen_cc(std::vector<bool>(50, false), 0.95);
    CHECK(none.degenerate);
    CHECK(std::isfinite(none.lr_cc));
    CHECK(none.lr_ind == 0.0);
    CHECK(none.lr_uc == doctest::Approx(-2 * 50 * std::log(0.95)));
    const auto all = fcsv::christoffersen_cc(std::vector<bool>(50, true), 0.95);
    CHECK(all.degenerate);
    CHECK(std::isfinite(all.lr_cc));
    CHECK(all.p_value_cc >= 0.0);
}

TEST_CASE("Christoffersen test has the nominal size")
{
    fcsv::Rng rng(77);
    int rejections = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<bool> hit(1000);
        for (auto&& h : hit) h = fcsv::uniform01(rng) < 0.05;
        rejections += fcsv::christoffersen_cc(hit, 0.95).p_value_cc < 0.05 ? 1 : 0;
    }
    MESSAGE("rejections " << rejections << " / 1000");
    CHECK(rejections >= 30);
    CHECK(rejections <= 70);
}

TEST_CASE("scoring against truth")
{
    fcsv::ChainSummary s;
    s.mode = 0.5;
    s.levels = {0.9};
    s.intervals = {{0.4, 0.6}};
    const std::vector<fcsv::ChainSummary> sums = {s, s};
    const std::vector<double> exact = {0.5, 0.4};
    const auto sc = fcsv::score_against_truth(sums, exact, 0.9);
    CHECK(sc[0].abs_dev == 0.0);
    CHECK(sc[0].sq_err == 0.0);
    CHECK(sc[0].covered);
    CHECK(sc[1].sq_err == doctest::Approx(0.01));

    // translation equivariance
    auto shifted = sums;
    for (auto& x : shifted) {
        x.mode += 3.0;
        x.intervals[0].low += 3.0;
        x.intervals[0].high += 3.0;
    }
    const std::vector<double> truths_shifted = {3.5, 3.4};
    const auto a = fcsv::average_scores(sc);
    const auto b = fcsv::average_scores(fcsv::score_against_truth(shifted, truths_shifted, 0.9));
    CHECK(a.mad == doctest::Approx(b.mad));
    CHECK(a.mse == doctest::Approx(b.mse));
    CHECK(a.coverage == b.coverage);
    CHECK_THROWS_AS(fcsv::score_against_truth(sums, std::vector<double>{1.0}, 0.9),
                    std::invalid_argument);
}

TEST_CASE("report emitters")
{
    fcsv::Rng rng(4);
    const auto x = normal_draws(500, 0, 1, rng);
    const std::vector<double> levels = {0.9, 0.95};
    const auto s = fcsv::summarize_chain(x, levels);
    std::ostringstream csv;
    const std::vector<std::string> names = {"tau_1"};
    fcsv::write_summary_csv(csv, names, std::vector<fcsv::ChainSummary>{s});
    CHECK(csv.str().rfind("parameter,mode,mean,ess,ess_degenerate,ci90_low,ci90_high,ci95_low,ci95_high\n", 0) == 0);
    nlohmann::json j = s;
    CHECK(j.at("mode").get<double>() == s.mode);
    CHECK(j.at("intervals").size() == 2);
    nlohmann::json jr = fcsv::christoffersen_cc(std::vector<bool>(20, false), 0.9);
    CHECK(jr.contains("p_value_cc"));
}
