#include <chrono>
#include <cmath>

#include "parmimo/errors.hpp"
#include "socp_internal.hpp"

namespace parmimo {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

SolveStatus parse_solve_status(std::string_view name) {
    if (name == "optimal") return SolveStatus::Optimal;
    if (name == "infeasible") return SolveStatus::Infeasible;
    if (name == "max_iterations") return SolveStatus::MaxIterations;
    throw ConfigError("unknown solve status '" + std::string(name) + "'");
}

namespace socp {

Method parse_method(std::string_view name) {
    if (name == "auto") return Method::Auto;
    if (name == "ipm") return Method::Ipm;
    if (name == "admm" || name == "bisection") return Method::Admm;
    throw ConfigError("solver method must be auto, ipm, admm or bisection, got '" + std::string(name) + "'");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::Auto: return "auto";
        case Method::Ipm: return "ipm";
        case Method::Admm: return "admm";
    }
    return "unknown";
}

SocpSolution solve(const SocpProblem& problem, const SolverOptions& opts) {
    if (opts.gamma_min > -1.0 || opts.max_iter < 1 || opts.admm_max_iter < 1) {
        throw RangeError("solver options out of range");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    SocpSolution sol;
    const Eigen::Index samples = problem.peak_cone_count();

    // gamma = 1, t = 0 is optimal whenever the plain BD signal already meets the peak bound.
    if (problem.offset().size() == 0 || problem.offset().cwiseAbs().maxCoeff() <= problem.peak_bound()) {
        sol.gamma_hat = 1.0;
        sol.t_hat = CVec::Zero(problem.m());
        sol.status = SolveStatus::Optimal;
        sol.dual_bound = 1.0;
        sol.peak_dual = CVec::Zero(samples);
        sol.method = "trivial";
        sol.wall_time = elapsed();
        return sol;
    }

    const detail::ReducedData data(problem, opts.gamma_min);
    Method method = opts.method;
    if (method == Method::Auto) method = data.A.dim() <= opts.ipm_max_dim ? Method::Ipm : Method::Admm;
    const detail::CoreResult core = method == Method::Ipm ? detail::solve_ipm(data, opts) : detail::solve_admm(data, opts);

    sol.method = to_string(method);
    sol.iterations = core.iterations;
    sol.gamma_hat = core.gamma;
    sol.t_hat = data.A.expand(core.v);
    sol.dual_bound = core.upper;
    sol.peak_dual = core.mu;
    sol.gap = core.upper - core.gamma;
    if (core.upper < data.gamma_lo) {
        sol.status = SolveStatus::Infeasible;
    } else if (core.gamma < data.gamma_lo) {
        sol.status = core.converged ? SolveStatus::Infeasible : SolveStatus::MaxIterations;
    } else {
        sol.status = core.converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
    }

    const CVec zsig = problem.peak_signal(sol.t_hat, sol.gamma_hat);
    const double peak = (zsig.cwiseAbs().maxCoeff() - problem.peak_bound()) / problem.peak_bound();
    const double ball = (sol.t_hat.squaredNorm() - problem.ball_coeff() * (1.0 - sol.gamma_hat)) / problem.ball_coeff();
    sol.primal_residual = std::max({peak, ball, 0.0});
    sol.wall_time = elapsed();
    return sol;
}

}  // namespace socp

}  // namespace parmimo
