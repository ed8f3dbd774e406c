// Matrix-free ADMM for the reduced problem with the splitting
//
//   minimize -gamma + I_ball(v, gamma) + I_box(z)  s.t.  z = A v + (1 + gamma) e,
//
// where I_ball restricts ||v||^2 <= a (1 - gamma), gamma in [gamma_min, 1], and
// I_box restricts |z_i| <= beta. Because A = Y diag(S) with orthonormal Y, the
// (v, gamma) update reduces to a scalar convex problem in gamma whose inner
// step is a diagonally weighted ball projection. Each iteration costs one
// forward and one inverse FFT per antenna.

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "socp_internal.hpp"

namespace parmimo::socp::detail {

namespace {

constexpr double kOverRelaxation = 1.6;
constexpr int kCheckEvery = 10;
constexpr int kAdaptEvery = 50;

// argmin ||S v - q||^2 subject to ||v||^2 <= radius2. Returns the multiplier
// of the norm constraint.
class WeightedBallProjector {
public:
    explicit WeightedBallProjector(const RVec& scales) : S_(scales), S2_(scales.array().square()) {}

    double project(const RVec& q, double radius2, RVec& v) {
        if (radius2 <= 0.0) {
            v.setZero(q.size());
            return q.isZero(0.0) ? 0.0 : std::numeric_limits<double>::infinity();
        }
        v = q.cwiseQuotient(S_);
        if (v.squaredNorm() <= radius2) return 0.0;

        const RVec sq = S_.cwiseProduct(q);
        const double sq2 = sq.squaredNorm();
        double lo = 0.0;
        double hi = std::sqrt(sq2 / radius2);
        double mu = std::clamp(warm_, lo, hi);
        for (int it = 0; it < 100; ++it) {
            const auto denom = (S2_.array() + mu);
            const double n2 = (sq.array().square() / denom.square()).sum();
            if (std::abs(n2 - radius2) <= 1e-14 * radius2) break;
            if (n2 > radius2) lo = mu;
            else hi = mu;
            const double d3 = (sq.array().square() / denom.cube()).sum();
            // Newton on 1/||v(mu)|| - 1/r, which is nearly linear in mu.
            const double phi = 1.0 / std::sqrt(n2) - 1.0 / std::sqrt(radius2);
            const double dphi = d3 / (n2 * std::sqrt(n2));
            double next = mu - phi / dphi;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            mu = next;
            if (hi - lo <= 1e-15 * hi) break;
        }
        v = (sq.array() / (S2_.array() + mu)).matrix();
        warm_ = mu;
        return mu;
    }

private:
    const RVec& S_;
    RVec S2_;
    double warm_ = 0.0;
};

void clip_to_box(CVec& z, double beta) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double mag = std::abs(z(i));
        if (mag > beta) z(i) *= beta / mag;
    }
}

}  // namespace

CoreResult solve_admm(const ReducedData& data, const SolverOptions& opts) {
    const ReducedOperator& A = data.A;
    const Eigen::Index n = A.dim();
    const RVec& S = A.scales();
    const double a = data.a;

    RVec e_par;
    A.adjoint(data.e, e_par);
    e_par = e_par.cwiseQuotient(S);
    const double e_perp2 = std::max(data.e.squaredNorm() - e_par.squaredNorm(), 0.0);

    double rho = 1.0 / (data.beta * data.beta);
    double gamma = 0.0;
    RVec v = RVec::Zero(n);
    CVec z = (1.0 + gamma) * data.e;
    clip_to_box(z, data.beta);
    CVec u = CVec::Zero(z.size());

    WeightedBallProjector ball(S);
    RVec w_par, q(n), res(n), tmp;
    CVec w, Lx, Lh, z_old;
    Incumbent best(data);

    const double gamma_top = 1.0 - 1e-12;
    int it = 0;
    for (; it < opts.admm_max_iter; ++it) {
        w = data.e - z + u;
        A.adjoint(w, w_par);
        w_par = w_par.cwiseQuotient(S);
        const double ew_perp = (data.e.conjugate().cwiseProduct(w)).sum().real() - e_par.dot(w_par);

        // d/dgamma of -gamma + rho/2 ||A v(gamma) + gamma e + w||^2 at the inner optimum v(gamma).
        const auto slope = [&](double g) {
            q = -(g * e_par + w_par);
            const double mult = ball.project(q, a * (1.0 - g), v);
            res = S.cwiseProduct(v) - q;
            return -1.0 + rho * (g * e_perp2 + ew_perp) + 0.5 * rho * (2.0 * res.dot(e_par) + mult * a);
        };
        const double f_lo = slope(data.gamma_min);
        if (f_lo >= 0.0) {
            gamma = data.gamma_min;
        } else {
            const double f_hi = slope(gamma_top);
            if (f_hi <= 0.0) {
                gamma = gamma_top;
            } else {
                boost::uintmax_t max_iter = 80;
                const auto [g_lo, g_hi] = boost::math::tools::toms748_solve(
                    slope, data.gamma_min, gamma_top, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(48), max_iter);
                gamma = 0.5 * (g_lo + g_hi);
            }
        }
        slope(gamma);

        A.apply(v, Lx);
        Lx += (1.0 + gamma) * data.e;
        Lh = kOverRelaxation * Lx + (1.0 - kOverRelaxation) * z;
        z_old = z;
        z = Lh + u;
        clip_to_box(z, data.beta);
        u += Lh - z;

        if (it % kCheckEvery == 0) {
            best.offer_point(v, gamma, Lx);
            best.offer_bound(rho * u);
            if (best.settled(opts.tol_gap)) break;
        }
        if (it % kAdaptEvery == kAdaptEvery - 1) {
            // Residual balancing between primal and dual feasibility.
            const double primal = (Lx - z).norm() / std::max({Lx.norm(), z.norm(), 1e-300});
            A.adjoint(z - z_old, tmp);
            const double dual = rho * tmp.norm();
            A.adjoint(u, tmp);
            const double dual_rel = dual / std::max(rho * tmp.norm(), 1e-300);
            if (primal > 10.0 * dual_rel) {
                rho *= 2.0;
                u /= 2.0;
            } else if (dual_rel > 10.0 * primal) {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    return best.result(it, opts.tol_gap);
}

}  // namespace parmimo::socp::detail
