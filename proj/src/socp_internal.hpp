#pragma once

#include "parmimo/socp.hpp"

namespace parmimo::socp::detail {

// Problem data in reduced coordinates: z(v, gamma) = A v + (1 + gamma) e.
struct ReducedData {
    const ReducedOperator& A;
    CVec e;  // half of Q b
    double beta;  // peak bound
    double a;  // ball coefficient
    double gamma_lo;
    double gamma_min;

    ReducedData(const SocpProblem& p, double gamma_min_);
};

// Output of a reduced-coordinate solver.
struct CoreResult {
    RVec v;
    double gamma = 0.0;
    double upper = 1.0;  // certified bound on the relaxed optimum
    CVec mu;  // peak multipliers behind `upper`
    int iterations = 0;
    bool converged = false;
};

double upper_bound(const ReducedData& data, const CVec& mu);

// Projects (v, gamma) onto the feasible set: clips gamma to 1, shrinks v into
// the ball, then scales (v, 1 + gamma) down until every peak constraint holds.
// `z` must hold A v + (1 + gamma) e on entry and is updated.
void restore_feasibility(const ReducedData& data, RVec& v, double& gamma, CVec& z);

// Keeps the best feasible point and the tightest bound seen so far.
class Incumbent {
public:
    explicit Incumbent(const ReducedData& data) : data_(data) {}

    // Restores a copy of (v, gamma) and records it if it improves.
    void offer_point(const RVec& v, double gamma, const CVec& z);
    void offer_bound(const CVec& mu);

    double gamma() const noexcept { return gamma_; }
    double upper() const noexcept { return upper_; }
    double gap() const noexcept { return upper_ - gamma_; }
    bool has_point() const noexcept { return has_point_; }
    // Optimal within tol, or proven to have no point at or above gamma_lo.
    bool settled(double tol_gap) const noexcept;

    CoreResult result(int iterations, double tol_gap) const;

private:
    const ReducedData& data_;
    bool has_point_ = false;
    RVec v_;
    double gamma_ = -1.0;
    double upper_ = 1.0;
    CVec mu_;
};

CoreResult solve_ipm(const ReducedData& data, const SolverOptions& opts);
CoreResult solve_admm(const ReducedData& data, const SolverOptions& opts);

}  // namespace parmimo::socp::detail
