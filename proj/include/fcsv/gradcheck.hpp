#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Analytic-vs-central-difference certification of the model gradients.

namespace fcsv {

struct GradCheckCase {
    std::string name;
    int points = 0;
    double max_rel_err = 0.0;
    bool passed = false;
};

struct GradCheckOptions {
    int points = 100;
    double step = 1e-5;
    double tolerance = 1e-4;
    std::uint64_t seed = 1;
};

/// One case per linking family for the factor copula posterior and for the SV margin
/// conditional (plus the independence link).
std::vector<GradCheckCase> run_gradient_checks(const GradCheckOptions& options);

}  // namespace fcsv
