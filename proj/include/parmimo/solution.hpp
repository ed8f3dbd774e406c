#pragma once

#include <string>
#include <string_view>

#include "parmimo/types.hpp"

namespace parmimo {

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

std::string to_string(SolveStatus s);
SolveStatus parse_solve_status(std::string_view name);

// Result of the PAR-constrained design problem. t_hat uses the wire order
// t = [t_1; ...; t_K], t_k = [t_{k,1}; ...; t_{k,d_sum}], t_{k,l} of length c_sum.
struct SocpSolution {
    double gamma_hat = 0.0;
    CVec t_hat;
    SolveStatus status = SolveStatus::MaxIterations;
    double primal_residual = 0.0;  // worst relative constraint violation of the returned point
    double gap = 0.0;  // certified upper bound minus gamma_hat
    double dual_bound = 0.0;  // certified upper bound on the optimal gamma
    CVec peak_dual;  // multipliers of the peak constraints, antenna-major
    int iterations = 0;
    double wall_time = 0.0;  // seconds
    std::string method;

    bool usable() const noexcept { return status != SolveStatus::Infeasible; }
};

}  // namespace parmimo
