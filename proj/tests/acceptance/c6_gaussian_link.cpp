#include "acceptance.hpp"
#include "fcsv/joint_sampler.hpp"
#include "test_support.hpp"

// Gaussian links: cor(eps_j, eps_k) = rho_j rho_k with rho = sin(pi tau / 2).

namespace acceptance {

Verdict criterion6()
{
    constexpr Eigen::Index kT = 50000;
    Checklist list;
    const fcsv::Vec tau{{0.2, 0.4, 0.6, 0.8}};
    const Eigen::Index d = tau.size();
    const fcsv::JointParams p{fcsv::Vec::Constant(d, -7.0), fcsv::Vec::Constant(d, 0.9),
                              fcsv::Vec::Constant(d, 0.3), tau,
                              std::vector<fcsv::CopulaFamily>(static_cast<std::size_t>(d),
                                                              fcsv::CopulaFamily::Gaussian)};
    fcsv::Rng rng(66);
    const auto sim = fcsv::simulate_joint(p, kT, rng);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = j + 1; k < d; ++k) {
            const std::vector<double> a(sim.eps.col(j).begin(), sim.eps.col(j).end());
            const std::vector<double> b(sim.eps.col(k).begin(), sim.eps.col(k).end());
            const double r = fcsv::testing::pearson(a, b);
            const double expect = std::sin(M_PI * tau[j] / 2.0) * std::sin(M_PI * tau[k] / 2.0);
            worst = std::max(worst, std::abs(r - expect));
            list.check(std::abs(r - expect) <= 0.02,
                       fmt("cor(eps_%d, eps_%d) = %.4f, rho_j rho_k = %.4f", static_cast<int>(j + 1),
                           static_cast<int>(k + 1), r, expect));
        }
    }
    // returns standardized by the simulated volatility carry the same errors
    const Eigen::MatrixXd back = sim.z.array() * (-0.5 * sim.s.bottomRows(kT).array()).exp();
    const double recon = (back - sim.eps).cwiseAbs().maxCoeff();
    list.check(recon <= 1e-9, fmt("z exp(-s/2) reproduces eps (max abs diff %.1e)", recon));
    return {list.passed(), fmt("T = %d, %d pairs, max |cor - rho_j rho_k| %.4f (<= 0.02)", static_cast<int>(kT),
                               static_cast<int>(d * (d - 1) / 2), worst)};
}

}  // namespace acceptance
