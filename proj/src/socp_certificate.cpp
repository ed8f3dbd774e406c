#include <algorithm>
#include <cmath>

#include "parmimo/errors.hpp"
#include "socp_internal.hpp"

namespace parmimo::socp {

namespace detail {

ReducedData::ReducedData(const SocpProblem& p, double gamma_min_)
    : A(p.reduced()),
      e(0.5 * p.offset()),
      beta(p.peak_bound()),
      a(p.ball_coeff()),
      gamma_lo(p.gamma_lo()),
      gamma_min(gamma_min_) {}

double upper_bound(const ReducedData& data, const CVec& mu) {
    // For feasible (v, gamma): gamma <= gamma + beta ||mu||_1 - Re<mu, A v + (1 + gamma) e>.
    // Maximize the right side over the ball and gamma in [gamma_min, 1], with s = 1 - gamma.
    const double kappa = (mu.conjugate().cwiseProduct(data.e)).sum().real();
    const double g = data.A.adjoint(mu).norm();
    const double s_max = 1.0 - data.gamma_min;
    const double slope = 1.0 - kappa;
    double s = s_max;
    if (slope > 0.0) {
        const double root = g * std::sqrt(data.a) / (2.0 * slope);
        s = std::clamp(root * root, 0.0, s_max);
    }
    const double bound = data.beta * mu.cwiseAbs().sum() - kappa + slope * (1.0 - s) + g * std::sqrt(data.a * s);
    return std::min(bound, 1.0);
}

void restore_feasibility(const ReducedData& data, RVec& v, double& gamma, CVec& z) {
    bool recompute = false;
    if (gamma > 1.0) {
        gamma = 1.0;
        recompute = true;
    }
    const double radius2 = data.a * (1.0 - gamma);
    const double norm2 = v.squaredNorm();
    if (norm2 > radius2) {
        v *= norm2 > 0.0 ? std::sqrt(radius2 / norm2) * (1.0 - 4e-16) : 0.0;
        recompute = true;
    }
    if (recompute) {
        data.A.apply(v, z);
        z += (1.0 + gamma) * data.e;
    }
    const double peak = z.cwiseAbs().maxCoeff() / data.beta;
    if (peak > 1.0) {
        // Shrinking (v, 1 + gamma) by the same factor keeps the ball constraint.
        const double p = peak * (1.0 + 4e-16);
        v /= p;
        gamma = (1.0 + gamma) / p - 1.0;
        z /= p;
    }
}

void Incumbent::offer_point(const RVec& v, double gamma, const CVec& z) {
    RVec vv = v;
    double gg = gamma;
    CVec zz = z;
    restore_feasibility(data_, vv, gg, zz);
    if (!has_point_ || gg > gamma_) {
        v_ = std::move(vv);
        gamma_ = gg;
        has_point_ = true;
    }
}

void Incumbent::offer_bound(const CVec& mu) {
    const double u = upper_bound(data_, mu);
    if (mu_.size() == 0 || u < upper_) {
        upper_ = u;
        mu_ = mu;
    }
}

bool Incumbent::settled(double tol_gap) const noexcept {
    if (upper_ < data_.gamma_lo) return true;
    return has_point_ && gap() <= tol_gap * std::max(1.0, std::abs(gamma_));
}

CoreResult Incumbent::result(int iterations, double tol_gap) const {
    CoreResult r;
    r.v = has_point_ ? v_ : RVec::Zero(data_.A.dim());
    r.gamma = has_point_ ? gamma_ : data_.gamma_min;
    r.upper = upper_;
    r.mu = mu_.size() > 0 ? mu_ : CVec::Zero(data_.e.size());
    r.iterations = iterations;
    r.converged = settled(tol_gap);
    return r;
}

}  // namespace detail

double dual_upper_bound(const SocpProblem& problem, const CVec& mu, double gamma_min) {
    if (mu.size() != problem.peak_cone_count()) throw LengthError("multiplier vector has wrong length");
    const detail::ReducedData data(problem, gamma_min);
    return detail::upper_bound(data, mu);
}

KktReport check_kkt(const SocpProblem& problem, const SocpSolution& solution, const SolverOptions& opts) {
    if (solution.t_hat.size() != problem.m()) throw LengthError("solution has wrong coefficient length");
    KktReport r;
    const CVec z = problem.peak_signal(solution.t_hat, solution.gamma_hat);
    const double beta = problem.peak_bound();
    const RVec mag = z.cwiseAbs();
    r.peak_residual = (mag.maxCoeff() - beta) / beta;
    r.ball_residual = solution.t_hat.squaredNorm() - problem.ball_coeff() * (1.0 - solution.gamma_hat);
    r.box_residual = std::max(problem.gamma_lo() - solution.gamma_hat, solution.gamma_hat - 1.0);

    if (solution.peak_dual.size() == problem.peak_cone_count()) {
        const RVec weight = solution.peak_dual.cwiseAbs();
        const double total = weight.sum();
        r.complementarity = total > 0.0 ? weight.dot((RVec::Constant(mag.size(), beta) - mag)) / (beta * total) : 0.0;
        r.dual_bound = dual_upper_bound(problem, solution.peak_dual, opts.gamma_min);
    } else {
        r.dual_bound = 1.0;
    }
    r.gap = r.dual_bound - solution.gamma_hat;
    r.primal_ok = r.peak_residual <= opts.tol_feas && r.ball_residual <= 1e-6 && r.box_residual <= 0.0;
    r.gap_ok = r.gap <= opts.tol_gap * std::max(1.0, std::abs(solution.gamma_hat));
    r.pass = r.primal_ok && r.gap_ok;
    return r;
}

}  // namespace parmimo::socp
