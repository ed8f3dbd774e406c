#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parmimo/model.hpp"
#include "parmimo/socp.hpp"

namespace parmimo::invariants {

// Worst-case residuals of the structural identities for one random draw,
// using a random coefficient matrix T and a random gamma in (0.5, 1].
struct StructuralResiduals {
    double null_space = 0.0;  // max ||H_bar U||
    double interference = 0.0;  // max ||R_j H_j F_hat^[l]||, l != j
    double effective_channel = 0.0;  // max ||R_j H_j F_hat^[j] - sqrt(gamma) diag(lambda_j)||
    double transform_norm = 0.0;  // | ||x_time|| - ||x_freq|| | / ||x_freq||
};

StructuralResiduals structural_residuals(const ValidatedConfig& cfg, std::uint64_t seed);

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Quick self-check: structural identities on a few configurations, operator
// adjointness and solver certificates on small instances.
std::vector<CheckLine> run_invariant_suite(int instances, std::uint64_t seed);

}  // namespace parmimo::invariants
