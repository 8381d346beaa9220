#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "fcsv/hmc.hpp"

using fcsv::Vec;

namespace {

fcsv::TargetDensity std_normal_target(Eigen::Index dim)
{
    return {dim, [](const Vec& q) { return -0.5 * q.squaredNorm(); },
            [](const Vec& q) -> Vec { return -q; }};
}

double hamiltonian(const Vec& q, const Vec& p)
{
    return 0.5 * q.squaredNorm() + 0.5 * p.squaredNorm();
}

}  // namespace

TEST_CASE("leapfrog single step on quadratic potential")
{
    const auto target = std_normal_target(1);
    const auto out = fcsv::leapfrog(Vec::Constant(1, 1.0), Vec::Zero(1), 0.1, 1, target, Vec());
    CHECK(out.q[0] == doctest::Approx(0.995).epsilon(1e-14));
    CHECK(out.p[0] == doctest::Approx(-0.09975).epsilon(1e-14));
}

TEST_CASE("leapfrog with zero step is the identity")
{
    const auto target = std_normal_target(3);
    const Vec q{{0.3, -1.2, 2.0}};
    const Vec p{{1.0, 0.5, -0.7}};
    const auto out = fcsv::leapfrog(q, p, 0.0, 7, target, Vec());
    CHECK((out.q - q).cwiseAbs().maxCoeff() == 0.0);
    CHECK((out.p - p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("leapfrog is reversible")
{
    // non-quadratic potential with a non-unit mass
    fcsv::TargetDensity target{
        2, [](const Vec& q) { return -std::pow(q[0], 4) / 4.0 - std::cosh(q[1]); },
        [](const Vec& q) -> Vec { return Vec{{-std::pow(q[0], 3), -std::sinh(q[1])}}; }};
    const Vec mass{{1.5, 0.7}};
    const Vec q{{0.8, -0.4}};
    const Vec p{{-0.3, 1.1}};
    const auto fwd = fcsv::leapfrog(q, p, 0.05, 40, target, mass);
    const auto back = fcsv::leapfrog(fwd.q, -fwd.p, 0.05, 40, target, mass);
    CHECK((back.q - q).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((back.p + p).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("energy error scales quadratically in the step size")
{
    const auto target = std_normal_target(2);
    const Vec q{{1.0, -0.5}};
    const Vec p{{0.3, 0.8}};
    const double h0 = hamiltonian(q, p);
    const double t_end = 1.3;
    const double eps = 0.05;
    const auto a = fcsv::leapfrog(q, p, eps, static_cast<int>(std::lround(t_end / eps)), target, Vec());
    const auto b =
        fcsv::leapfrog(q, p, eps / 2, static_cast<int>(std::lround(2 * t_end / eps)), target, Vec());
    const double ratio = std::abs(hamiltonian(a.q, a.p) - h0) / std::abs(hamiltonian(b.q, b.p) - h0);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("small step sizes are almost always accepted")
{
    const auto target = std_normal_target(1);
    fcsv::HmcSettings settings{1e-3, 5, Vec()};
    fcsv::Rng rng(11);
    Vec q = Vec::Constant(1, 0.5);
    int accepted = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto step = fcsv::hmc_step(q, target, settings, rng);
        q = step.q;
        accepted += step.accepted ? 1 : 0;
    }
    CHECK(accepted >= 990);
}

TEST_CASE("chain reproduces standard normal moments")
{
    const auto target = std_normal_target(1);
    fcsv::HmcSettings settings{0.2, 40, Vec()};
    settings.validate(1);
    fcsv::Rng rng(2024);
    Vec q = Vec::Zero(1);
    const int n = 50000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto step = fcsv::hmc_step(q, target, settings, rng);
        q = step.q;
        REQUIRE(std::isfinite(step.log_density));
        sum += q[0];
        sum_sq += q[0] * q[0];
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("non-finite gradient at the proposal is rejected")
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fcsv::TargetDensity target{1, [](const Vec& q) { return -0.5 * q.squaredNorm(); },
                               [nan](const Vec& q) -> Vec {
                                   return q[0] == 0.25 ? Vec(-q) : Vec::Constant(1, nan);
                               }};
    fcsv::HmcSettings settings{0.1, 3, Vec()};
    fcsv::Rng rng(5);
    const Vec q = Vec::Constant(1, 0.25);
    for (int i = 0; i < 20; ++i) {
        const auto step = fcsv::hmc_step(q, target, settings, rng);
        CHECK_FALSE(step.accepted);
        CHECK(step.q[0] == 0.25);
        CHECK(std::isfinite(step.log_density));
    }
}

TEST_CASE("non-finite proposal density is rejected")
{
    fcsv::TargetDensity target{
        1,
        [](const Vec& q) {
            return q[0] == -1e-3 ? -0.5 * q[0] * q[0] : -std::numeric_limits<double>::infinity();
        },
        [](const Vec& q) -> Vec { return -q; }};
    fcsv::HmcSettings settings{0.1, 3, Vec()};
    fcsv::Rng rng(9);
    const Vec q = Vec::Constant(1, -1e-3);
    for (int i = 0; i < 20; ++i) {
        const auto step = fcsv::hmc_step(q, target, settings, rng);
        CHECK_FALSE(step.accepted);
        CHECK(step.q[0] == q[0]);
    }
}

TEST_CASE("settings validation")
{
    CHECK_THROWS_AS((fcsv::HmcSettings{0.0, 5, Vec()}.validate(1)), std::invalid_argument);
    CHECK_THROWS_AS((fcsv::HmcSettings{0.1, 0, Vec()}.validate(1)), std::invalid_argument);
    CHECK_THROWS_AS((fcsv::HmcSettings{0.1, 5, Vec{{1.0, -1.0}}}.validate(2)), std::invalid_argument);
    CHECK_THROWS_AS((fcsv::HmcSettings{0.1, 5, Vec{{1.0}}}.validate(2)), std::invalid_argument);
    CHECK_NOTHROW((fcsv::HmcSettings{0.1, 5, Vec{{1.0, 2.0}}}.validate(2)));
}

TEST_CASE("substreams are deterministic and distinct")
{
    auto a = fcsv::make_stream(42, 0);
    auto b = fcsv::make_stream(42, 0);
    auto c = fcsv::make_stream(42, 1);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
}
