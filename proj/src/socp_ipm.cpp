// Primal-dual interior-point method for the reduced problem
//
//   minimize -gamma  s.t.  gamma >= gamma_min,
//                          ||v||^2 <= a (1 - gamma),
//                          |A v + (1 + gamma) e|_i <= beta.
//
// Conic form s = h - G x, s in K, with x = (v, gamma) and K the product of a
// nonnegative ray, one second-order cone of dimension n + 2 for the ball and
// one three-dimensional cone per time sample. Search directions use
// Nesterov-Todd scaling and Mehrotra's predictor-corrector; the normal matrix
// G^T W^-2 G is assembled densely with FFTs of the per-sample scaling weights.

#include <algorithm>
#include <cmath>
#include <limits>

#include "parmimo/fft.hpp"
#include "socp_internal.hpp"

namespace parmimo::socp::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
    Eigen::Index n;  // reduced variables
    Eigen::Index samples;  // peak cones

    static constexpr Eigen::Index lin = 0;
    static constexpr Eigen::Index ball = 1;
    Eigen::Index ball_dim() const { return n + 2; }
    Eigen::Index peak(Eigen::Index i) const { return n + 3 + 3 * i; }
    Eigen::Index size() const { return n + 3 + 3 * samples; }
    Eigen::Index degree() const { return 2 + samples; }
};

template <typename F>
void for_each_soc(const Layout& L, F&& f) {
    f(Layout::ball, L.ball_dim());
    for (Eigen::Index i = 0; i < L.samples; ++i) f(L.peak(i), 3);
}

double jdot(const RVec& u, const RVec& v, Eigen::Index at, Eigen::Index dim) {
    return u(at) * v(at) - u.segment(at + 1, dim - 1).dot(v.segment(at + 1, dim - 1));
}

// Largest alpha with u + alpha d still in the cone, for u in its interior.
double soc_step(const RVec& u, const RVec& d, Eigen::Index at, Eigen::Index dim) {
    const double qa = jdot(d, d, at, dim);
    const double qb = jdot(u, d, at, dim);
    const double qc = std::max(jdot(u, u, at, dim), 0.0);
    double best = kInf;
    if (d(at) < 0.0) best = -u(at) / d(at);
    const auto take = [&](double r) {
        if (r > 0.0 && r < best) best = r;
    };
    if (qa == 0.0) {
        if (qb < 0.0) take(-qc / (2.0 * qb));
    } else {
        const double disc = qb * qb - qa * qc;
        if (disc >= 0.0) {
            const double q = -(qb + std::copysign(std::sqrt(disc), qb));
            if (q != 0.0) {
                take(q / qa);
                take(qc / q);
            }
        }
    }
    return best;
}

double max_step(const Layout& L, const RVec& u, const RVec& d) {
    double best = d(Layout::lin) < 0.0 ? -u(Layout::lin) / d(Layout::lin) : kInf;
    for_each_soc(L, [&](Eigen::Index at, Eigen::Index dim) { best = std::min(best, soc_step(u, d, at, dim)); });
    return best;
}

RVec jordan_product(const Layout& L, const RVec& u, const RVec& v) {
    RVec out(u.size());
    out(Layout::lin) = u(Layout::lin) * v(Layout::lin);
    for_each_soc(L, [&](Eigen::Index at, Eigen::Index dim) {
        out(at) = u.segment(at, dim).dot(v.segment(at, dim));
        out.segment(at + 1, dim - 1) = u(at) * v.segment(at + 1, dim - 1) + v(at) * u.segment(at + 1, dim - 1);
    });
    return out;
}

// x with lambda o x = b.
RVec jordan_divide(const Layout& L, const RVec& lambda, const RVec& b) {
    RVec out(b.size());
    out(Layout::lin) = b(Layout::lin) / lambda(Layout::lin);
    for_each_soc(L, [&](Eigen::Index at, Eigen::Index dim) {
        const double l0 = lambda(at);
        const auto l1 = lambda.segment(at + 1, dim - 1);
        const auto b1 = b.segment(at + 1, dim - 1);
        const double x0 = (l0 * b(at) - l1.dot(b1)) / jdot(lambda, lambda, at, dim);
        out(at) = x0;
        out.segment(at + 1, dim - 1) = (b1 - x0 * l1) / l0;
    });
    return out;
}

RVec identity_element(const Layout& L) {
    RVec out = RVec::Zero(L.size());
    out(Layout::lin) = 1.0;
    for_each_soc(L, [&](Eigen::Index at, Eigen::Index) { out(at) = 1.0; });
    return out;
}

RVec jordan_inverse(const Layout& L, const RVec& s) {
    RVec out(s.size());
    out(Layout::lin) = 1.0 / s(Layout::lin);
    for_each_soc(L, [&](Eigen::Index at, Eigen::Index dim) {
        const double det = jdot(s, s, at, dim);
        out(at) = s(at) / det;
        out.segment(at + 1, dim - 1) = -s.segment(at + 1, dim - 1) / det;
    });
    return out;
}

// Nesterov-Todd scaling: W z = W^{-1} s = lambda. For a second-order cone
// W = eta * Wbar with Wbar^2 = 2 wbar wbar^T - J.
struct Scaling {
    double lin = 1.0;
    RVec wbar;  // same layout as s; lin entry unused
    RVec eta;  // per cone: 0 lin, 1 ball, 2 + i peaks

    Scaling(const Layout& L, const RVec& s, const RVec& z) : wbar(RVec::Zero(L.size())), eta(L.degree()) {
        lin = std::sqrt(s(Layout::lin) / z(Layout::lin));
        eta(0) = 1.0;
        Eigen::Index cone = 1;
        for_each_soc(L, [&](Eigen::Index at, Eigen::Index dim) {
            const double ns = std::sqrt(std::max(jdot(s, s, at, dim), 1e-300));
            const double nz = std::sqrt(std::max(jdot(z, z, at, dim), 1e-300));
            const auto sb = s.segment(at, dim) / ns;
            const auto zb = z.segment(at, dim) / nz;
            const double g = std::sqrt(std::max((1.0 + sb.dot(zb)) / 2.0, 1e-300));
            auto w = wbar.segment(at, dim);
            w(0) = (sb(0) + zb(0)) / (2.0 * g);
            w.tail(dim - 1) = (sb.tail(dim - 1) - zb.tail(dim - 1)) / (2.0 * g);
            eta(cone++) = std::sqrt(ns / nz);
        });
    }

    enum class Power { W, Inverse, InverseSquared };

    RVec apply(const Layout& L, const RVec& x, Power p) const {
        RVec out(x.size());
        const double xl = x(Layout::lin);
        out(Layout::lin) = p == Power::W ? lin * xl : p == Power::Inverse ? xl / lin : xl / (lin * lin);
        Eigen::Index cone = 1;
        for_each_soc(L, [&](Eigen::Index at, Eigen::Index dim) {
            const double e = eta(cone++);
            const auto w = wbar.segment(at, dim);
            const auto x1 = x.segment(at + 1, dim - 1);
            const auto w1 = w.tail(dim - 1);
            const double wx1 = w1.dot(x1);
            switch (p) {
                case Power::W:
                    out(at) = e * (w(0) * x(at) + wx1);
                    out.segment(at + 1, dim - 1) = e * (x1 + (x(at) + wx1 / (1.0 + w(0))) * w1);
                    break;
                case Power::Inverse:
                    out(at) = (w(0) * x(at) - wx1) / e;
                    out.segment(at + 1, dim - 1) = (x1 + (-x(at) + wx1 / (1.0 + w(0))) * w1) / e;
                    break;
                case Power::InverseSquared: {
                    // eta^-2 (2 wt wt^T - J) x with wt = J wbar.
                    const double wtx = w(0) * x(at) - wx1;
                    const double inv = 1.0 / (e * e);
                    out(at) = inv * (2.0 * w(0) * wtx - x(at));
                    out.segment(at + 1, dim - 1) = inv * (-2.0 * wtx * w1 + x1);
                    break;
                }
            }
        });
        return out;
    }
};

class ConicForm {
public:
    explicit ConicForm(const ReducedData& data)
        : data_(data), L_{data.A.dim(), data.A.outputs()}, sqrt_a_half_(0.5 * std::sqrt(data.a)) {}

    const Layout& layout() const noexcept { return L_; }

    RVec G(const RVec& x) const {
        const Eigen::Index n = L_.n;
        const double gamma = x(n);
        RVec out(L_.size());
        out(Layout::lin) = -gamma;
        out(Layout::ball) = sqrt_a_half_ * gamma;
        out.segment(Layout::ball + 1, n) = -x.head(n);
        out(Layout::ball + n + 1) = sqrt_a_half_ * gamma;
        data_.A.apply(x.head(n), work_);
        work_ += gamma * data_.e;
        for (Eigen::Index i = 0; i < L_.samples; ++i) {
            const Eigen::Index at = L_.peak(i);
            out(at) = 0.0;
            out(at + 1) = -work_(i).real();
            out(at + 2) = -work_(i).imag();
        }
        return out;
    }

    RVec GT(const RVec& y) const {
        const Eigen::Index n = L_.n;
        CVec yc(L_.samples);
        for (Eigen::Index i = 0; i < L_.samples; ++i) yc(i) = cplx(y(L_.peak(i) + 1), y(L_.peak(i) + 2));
        RVec out(n + 1);
        RVec av;
        data_.A.adjoint(yc, av);
        out.head(n) = -y.segment(Layout::ball + 1, n) - av;
        out(n) = -y(Layout::lin) + sqrt_a_half_ * (y(Layout::ball) + y(Layout::ball + n + 1)) -
                 (data_.e.conjugate().cwiseProduct(yc)).sum().real();
        return out;
    }

    RVec h() const {
        RVec out = RVec::Zero(L_.size());
        out(Layout::lin) = -data_.gamma_min;
        out(Layout::ball) = 2.0 * sqrt_a_half_;
        for (Eigen::Index i = 0; i < L_.samples; ++i) {
            const Eigen::Index at = L_.peak(i);
            out(at) = data_.beta;
            out(at + 1) = data_.e(i).real();
            out(at + 2) = data_.e(i).imag();
        }
        return out;
    }

    // Dense G^T W^-2 G, lower triangle.
    RMat normal_matrix(const Scaling& sc, const RVec& s, const RVec& z) const {
        const Eigen::Index n = L_.n;
        const int M = data_.A.M();
        const int K = data_.A.K();
        RMat N = RMat::Zero(n + 1, n + 1);

        // Peak cones: lower 2x2 block of W^-2 is delta I + [[Re rho, Im rho], [Im rho, -Re rho]].
        RVec delta(L_.samples);
        CVec rho(L_.samples);
        for (Eigen::Index i = 0; i < L_.samples; ++i) {
            const Eigen::Index at = L_.peak(i);
            const double inv = 1.0 / (sc.eta(2 + i) * sc.eta(2 + i));
            const cplx wt(-sc.wbar(at + 1), -sc.wbar(at + 2));
            delta(i) = inv * (1.0 + std::norm(wt));
            rho(i) = inv * wt * wt;
        }
        // Per antenna: Delta[m] = K^-1 sum_n delta_n e^{+j2pi mn/K}, Rho likewise with conj(rho).
        const UnitaryDft dft(K);
        const double scale = 1.0 / std::sqrt(static_cast<double>(K));
        CVec dspec = delta.cast<cplx>();
        CVec rspec = rho.conjugate();
        dft.inverse(dspec.data(), M);
        dft.inverse(rspec.data(), M);
        dspec *= scale;
        rspec *= scale;

        CVec dv(M), rv(M);
        for (int k = 0; k < K; ++k) {
            const CMat& Bk = data_.A.block(k);
            if (Bk.cols() == 0) continue;
            const Eigen::Index ok = data_.A.block_offset(k);
            for (int kk = k; kk < K; ++kk) {
                const CMat& Bkk = data_.A.block(kk);
                if (Bkk.cols() == 0) continue;
                const int m1 = (kk - k) % K;
                const int m2 = (k + kk) % K;
                for (int i = 0; i < M; ++i) {
                    dv(i) = dspec(static_cast<Eigen::Index>(i) * K + m1);
                    rv(i) = rspec(static_cast<Eigen::Index>(i) * K + m2);
                }
                const RMat block = (Bk.adjoint() * dv.asDiagonal() * Bkk).real() + (Bk.transpose() * rv.asDiagonal() * Bkk).real();
                N.block(data_.A.block_offset(kk), ok, Bkk.cols(), Bk.cols()) = block.transpose();
            }
        }
        // Cross terms with gamma and the gamma diagonal.
        CVec y = delta.cast<cplx>().cwiseProduct(data_.e) + rho.cwiseProduct(data_.e.conjugate());
        N.row(n).head(n) = data_.A.adjoint(y).transpose();
        N(n, n) = delta.dot(data_.e.cwiseAbs2()) + (rho.conjugate().cwiseProduct(data_.e.cwiseProduct(data_.e))).sum().real();

        // Ball cone: eta^-2 (2 g g^T + diag(I, 0)), g = G_ball^T J wbar.
        const double inv_b = 1.0 / (sc.eta(1) * sc.eta(1));
        RVec g(n + 1);
        g.head(n) = sc.wbar.segment(Layout::ball + 1, n);
        g(n) = sqrt_a_half_ * (sc.wbar(Layout::ball) - sc.wbar(Layout::ball + n + 1));
        N.diagonal().head(n).array() += inv_b;
        N.triangularView<Eigen::Lower>() += 2.0 * inv_b * (g * g.transpose());

        // gamma >= gamma_min.
        N(n, n) += z(Layout::lin) / s(Layout::lin);
        return N;
    }

private:
    const ReducedData& data_;
    Layout L_;
    double sqrt_a_half_;
    mutable CVec work_;
};

class NewtonSystem {
public:
    NewtonSystem(const ConicForm& form, const Scaling& sc, const RVec& lambda, const RVec& s, const RVec& z)
        : form_(form), sc_(sc), lambda_(lambda), N_(form.normal_matrix(sc, s, z)) {
        factor();
    }

    bool ok() const noexcept { return ok_; }

    void solve(const RVec& bx, const RVec& bz, const RVec& bs, RVec& dx, RVec& dz, RVec& ds) const {
        const Layout& L = form_.layout();
        const RVec q = jordan_divide(L, lambda_, bs);
        const RVec r = bz - sc_.apply(L, q, Scaling::Power::W);
        const RVec rhs = bx + form_.GT(sc_.apply(L, r, Scaling::Power::InverseSquared));
        dx = llt_.solve(rhs);
        const RVec res = rhs - N_.selfadjointView<Eigen::Lower>() * dx;
        dx += llt_.solve(res);
        dz = sc_.apply(L, form_.G(dx) - r, Scaling::Power::InverseSquared);
        ds = sc_.apply(L, q - sc_.apply(L, dz, Scaling::Power::W), Scaling::Power::W);
    }

private:
    void factor() {
        llt_.compute(N_);
        if (llt_.info() == Eigen::Success) return;
        const double base = std::max(N_.diagonal().cwiseAbs().maxCoeff(), 1e-300);
        for (double reg = 1e-14; reg <= 1e-6; reg *= 100.0) {
            RMat shifted = N_;
            shifted.diagonal().array() += reg * base;
            llt_.compute(shifted);
            if (llt_.info() == Eigen::Success) return;
        }
        ok_ = false;
    }

    const ConicForm& form_;
    const Scaling& sc_;
    const RVec& lambda_;
    RMat N_;
    Eigen::LLT<RMat> llt_;
    bool ok_ = true;
};

}  // namespace

CoreResult solve_ipm(const ReducedData& data, const SolverOptions& opts) {
    const ConicForm form(data);
    const Layout& L = form.layout();
    const Eigen::Index n = L.n;
    const RVec h = form.h();
    RVec c = RVec::Zero(n + 1);
    c(n) = -1.0;

    // Strictly feasible start with v = 0 and z the Jordan inverse of s.
    const double emax = data.e.size() > 0 ? data.e.cwiseAbs().maxCoeff() : 0.0;
    const double one_plus = emax > 0.0 ? std::min(1.5, 0.5 * data.beta / emax) : 1.5;
    RVec x = RVec::Zero(n + 1);
    x(n) = one_plus - 1.0;
    RVec s = h - form.G(x);
    RVec z = jordan_inverse(L, s);
    const RVec unit = identity_element(L);

    Incumbent best(data);
    CVec zsig;
    CVec mu(L.samples);
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        data.A.apply(x.head(n), zsig);
        zsig += (1.0 + x(n)) * data.e;
        best.offer_point(x.head(n), x(n), zsig);
        for (Eigen::Index i = 0; i < L.samples; ++i) mu(i) = -cplx(z(L.peak(i) + 1), z(L.peak(i) + 2));
        best.offer_bound(mu);
        if (best.settled(opts.tol_gap)) break;

        const RVec rx = form.GT(z) + c;
        const RVec rz = s + form.G(x) - h;
        const double mu_c = s.dot(z) / static_cast<double>(L.degree());

        const Scaling sc(L, s, z);
        const RVec lambda = sc.apply(L, z, Scaling::Power::W);
        const NewtonSystem newton(form, sc, lambda, s, z);
        if (!newton.ok()) break;
        const RVec ll = jordan_product(L, lambda, lambda);

        RVec dxa, dza, dsa;
        newton.solve(-rx, -rz, -ll, dxa, dza, dsa);
        const double alpha_aff = std::min({1.0, max_step(L, s, dsa), max_step(L, z, dza)});
        const double sigma = std::pow(1.0 - alpha_aff, 3);

        const RVec corr = jordan_product(L, sc.apply(L, dsa, Scaling::Power::Inverse), sc.apply(L, dza, Scaling::Power::W));
        const RVec bs = -ll - corr + sigma * mu_c * unit;
        RVec dx, dz, ds;
        newton.solve(-(1.0 - sigma) * rx, -(1.0 - sigma) * rz, bs, dx, dz, ds);
        const double alpha = std::min(1.0, 0.99 * std::min(max_step(L, s, ds), max_step(L, z, dz)));
        if (!std::isfinite(alpha) || alpha < 1e-12 || !dx.allFinite()) break;
        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
    }
    return best.result(it, opts.tol_gap);
}

}  // namespace parmimo::socp::detail
