#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "fcsv/joint_sampler.hpp"
#include "fcsv/special.hpp"
#include "test_support.hpp"

using fcsv::CopulaFamily;
using fcsv::Vec;

namespace {

fcsv::JointParams small_params()
{
    return {Vec{{-6.0, -7.0, -6.5}}, Vec{{0.8, 0.9, 0.85}}, Vec{{0.2, 0.3, 0.25}},
            Vec{{0.4, 0.5, 0.6}},
            {CopulaFamily::Gaussian, CopulaFamily::Clayton, CopulaFamily::Gumbel}};
}

// Joint log posterior up to a constant, assembled from the per-margin conditionals.
double joint_log_post(const fcsv::JointState& st, const fcsv::JointData& data)
{
    double lp = 0.0;
    const Vec v = st.dependence.v();
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        lp += fcsv::log_conditional(st.margins[j], data.margin(j), v, st.link(j));
    }
    for (Eigen::Index t = 0; t < st.dependence.w.size(); ++t) lp += fcsv::log_prior_u(st.dependence.w[t]);
    for (Eigen::Index j = 0; j < st.dependence.delta.size(); ++j) lp += fcsv::log_prior_u(st.dependence.delta[j]);
    return lp;
}

}  // namespace

TEST_CASE("family sets")
{
    CHECK_THROWS_AS(fcsv::FamilySet({}), std::invalid_argument);
    CHECK_THROWS_AS(fcsv::FamilySet({CopulaFamily::Gumbel, CopulaFamily::Gumbel}), std::invalid_argument);
    CHECK(fcsv::FamilySet::base().size() == 4);
    CHECK(fcsv::FamilySet::with_survival().size() == 6);
}

TEST_CASE("family full conditional")
{
    fcsv::Rng rng(1);
    const auto sim = fcsv::simulate_joint(small_params(), 200, rng);
    const fcsv::JointData data(sim.z);
    auto st = fcsv::JointState::initial(data, fcsv::FamilySet::base());
    st.dependence.w = sim.v.unaryExpr([](double x) { return fcsv::special::logit(x); });
    const Eigen::MatrixXd u = fcsv::copula_scale(st, data);
    for (Eigen::Index j = 0; j < 3; ++j) {
        const auto p = fcsv::family_probabilities(Vec(u.col(j)), st.dependence.v(), 0.3,
                                                  fcsv::FamilySet::with_survival());
        double total = 0.0;
        for (double x : p) total += x;
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
    const fcsv::FamilySet single({CopulaFamily::Clayton});
    for (int i = 0; i < 20; ++i) {
        CHECK(fcsv::sample_family(0, st, u, single, rng) == CopulaFamily::Clayton);
    }
}

TEST_CASE("simulate_joint closed forms")
{
    fcsv::Rng rng(2);
    fcsv::JointParams p{Vec{{-1.0, -2.0}}, Vec{{0.0, 0.0}}, Vec{{0.0, 0.0}}, Vec{{0.3, 0.5}},
                        {CopulaFamily::Gaussian, CopulaFamily::Gaussian}};
    const auto sim = fcsv::simulate_joint(p, 50000, rng);
    CHECK((sim.s.col(0).array() == -1.0).all());
    CHECK((sim.s.col(1).array() == -2.0).all());
    const double rho1 = std::sin(fcsv::special::kPi * 0.3 / 2);
    const double rho2 = std::sin(fcsv::special::kPi * 0.5 / 2);
    std::vector<double> e1(sim.eps.col(0).data(), sim.eps.col(0).data() + 50000);
    std::vector<double> e2(sim.eps.col(1).data(), sim.eps.col(1).data() + 50000);
    CHECK(std::abs(fcsv::testing::pearson(e1, e2) - rho1 * rho2) < 0.02);
    for (int j = 0; j < 2; ++j) {
        const double m = sim.eps.col(j).mean();
        const double var = (sim.eps.col(j).array() - m).square().mean();
        CHECK(std::abs(m) < 0.02);
        CHECK(std::abs(var - 1.0) < 0.05);
    }
    CHECK((sim.z.array() == (0.5 * sim.s.bottomRows(50000).array()).exp() * sim.eps.array()).all());
    p.tau[0] = 1.0;
    CHECK_THROWS_AS(fcsv::simulate_joint(p, 10, rng), std::domain_error);
}

TEST_CASE("margin updates only change their own conditional")
{
    fcsv::Rng rng(3);
    const auto sim = fcsv::simulate_joint(small_params(), 60, rng);
    const fcsv::JointData data(sim.z);
    auto base = fcsv::JointState::initial(data, fcsv::FamilySet::base());
    base.families = small_params().families;
    base.dependence.delta = Vec{{0.2, -0.4, 0.9}};
    base.dependence.w = Vec::LinSpaced(60, -1.0, 1.0);
    for (auto& m : base.margins) for (auto& x : m.s_tilde) x = 0.5 * fcsv::std_normal(rng);

    auto moved = base;
    moved.margins[0].mu += 0.3;
    moved.margins[0].s_tilde[4] -= 0.7;
    const Vec v = base.dependence.v();
    const double d_cond = fcsv::log_conditional(moved.margins[0], data.margin(0), v, moved.link(0)) -
                          fcsv::log_conditional(base.margins[0], data.margin(0), v, base.link(0));
    const double d_joint = joint_log_post(moved, data) - joint_log_post(base, data);
    CHECK(d_joint == doctest::Approx(d_cond).epsilon(1e-10));

    // same change with a different state of margin 2
    auto base2 = base;
    base2.margins[2].psi += 0.4;
    base2.margins[2].s_tilde *= -1.0;
    auto moved2 = moved;
    moved2.margins[2] = base2.margins[2];
    const double d_joint2 = joint_log_post(moved2, data) - joint_log_post(base2, data);
    CHECK(d_joint2 == doctest::Approx(d_cond).epsilon(1e-10));
}

TEST_CASE("a sweep with every proposal rejected keeps the state")
{
    fcsv::Rng rng(4);
    const auto sim = fcsv::simulate_joint(small_params(), 80, rng);
    const fcsv::JointData data(sim.z);
    fcsv::FitConfig cfg;
    cfg.dependence_settings = {1e6, 40, {}};
    cfg.margin_settings = {1e6, 30, {}};
    auto st = fcsv::JointState::initial(data, cfg.family_set);
    const auto before = st;
    auto streams = fcsv::ChainStreams::from_seed(9, 3);
    for (int i = 0; i < 5; ++i) {
        const auto stats = fcsv::gibbs_sweep(st, data, cfg, streams);
        CHECK_FALSE(stats.dependence_accepted);
    }
    for (int j = 0; j < 3; ++j) {
        CHECK(st.margins[j].mu == before.margins[j].mu);
        CHECK(st.margins[j].s_tilde == before.margins[j].s_tilde);
    }
    CHECK(st.dependence.delta == before.dependence.delta);
    CHECK(st.dependence.w == before.dependence.w);
}

TEST_CASE("fits are deterministic given the seed, independent of thread count")
{
    fcsv::Rng rng(5);
    const auto sim = fcsv::simulate_joint(small_params(), 100, rng);
    const fcsv::JointData data(sim.z);
    fcsv::FitConfig cfg;
    cfg.n_iter = 40;
    cfg.n_burn = 10;
    cfg.seed = 77;
    cfg.track_times = {1, 50, 100};
    const auto a = fcsv::fit_joint(data, cfg);
    const auto b = fcsv::fit_joint(data, cfg);
    cfg.threads = 3;
    const auto c = fcsv::fit_joint(data, cfg);
    REQUIRE(a.draws.size() == 30);
    std::ostringstream sa, sb, sc;
    fcsv::write_draws_csv(sa, a.draws);
    fcsv::write_draws_csv(sb, b.draws);
    fcsv::write_draws_csv(sc, c.draws);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str() == sc.str());
    cfg.seed = 78;
    std::ostringstream sd;
    fcsv::write_draws_csv(sd, fcsv::fit_joint(data, cfg).draws);
    CHECK(sa.str() != sd.str());
}

TEST_CASE("draw CSV round trip")
{
    fcsv::Rng rng(6);
    const auto sim = fcsv::simulate_joint(small_params(), 50, rng);
    fcsv::FitConfig cfg;
    cfg.n_iter = 12;
    cfg.n_burn = 2;
    cfg.track_times = {3, 50};
    const auto fit = fcsv::fit_joint(fcsv::JointData(sim.z), cfg);
    std::stringstream ss;
    fcsv::write_draws_csv(ss, fit.draws);
    const std::string text = ss.str();
    CHECK(text.rfind("mu_1,mu_2,mu_3,phi_1,phi_2,phi_3,sigma_1,sigma_2,sigma_3,tau_1,tau_2,tau_3,"
                     "m_1,m_2,m_3,s_last_1,s_last_2,s_last_3,s_3_1,s_3_2,s_3_3,s_50_1,s_50_2,s_50_3,v_3,v_50\n",
                     0) == 0);
    const auto back = fcsv::read_draws_csv(ss);
    REQUIRE(back.size() == fit.draws.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].mu == fit.draws[i].mu);
        CHECK(back[i].phi == fit.draws[i].phi);
        CHECK(back[i].sigma == fit.draws[i].sigma);
        CHECK(back[i].tau == fit.draws[i].tau);
        CHECK(back[i].families == fit.draws[i].families);
        CHECK(back[i].s_last == fit.draws[i].s_last);
        CHECK(back[i].s_tracked == fit.draws[i].s_tracked);
        CHECK(back[i].v_tracked == fit.draws[i].v_tracked);
    }
    std::istringstream bad("tau_1,tau_2\n0.1,0.2\n");
    CHECK_THROWS_AS(fcsv::read_draws_csv(bad), std::invalid_argument);
}

TEST_CASE("validation before sampling")
{
    Eigen::MatrixXd z = Eigen::MatrixXd::Ones(10, 2);
    z(3, 1) = std::nan("");
    CHECK_THROWS_AS(fcsv::JointData{z}, std::invalid_argument);
    CHECK_THROWS_AS(fcsv::JointData{Eigen::MatrixXd::Ones(10, 1)}, std::invalid_argument);
    fcsv::FitConfig cfg;
    cfg.n_burn = cfg.n_iter;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
