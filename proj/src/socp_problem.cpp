#include <cmath>

#include "parmimo/errors.hpp"
#include "parmimo/socp.hpp"

namespace parmimo::socp {

namespace {

constexpr double kReductionTol = 1e-10;

}  // namespace

ReducedOperator::ReducedOperator(const precoder::DesignOperators& ops, CoefficientDomain domain)
    : M_(ops.M), K_(ops.K), block_len_(static_cast<Eigen::Index>(ops.c_sum) * ops.d_sum), domain_(domain), dft_(ops.K) {
    blocks_.reserve(static_cast<std::size_t>(K_));
    bases_.reserve(static_cast<std::size_t>(K_));
    offsets_.reserve(static_cast<std::size_t>(K_) + 1);
    std::vector<double> sigma_all;
    Eigen::Index offset = 0;
    for (int k = 0; k < K_; ++k) {
        const CMat& G = ops.G_blocks.at(static_cast<std::size_t>(k));
        const Eigen::Index L = block_len_;
        RMat stacked;
        if (domain_ == CoefficientDomain::Complex) {
            // Real coordinates (Re t, Im t) map to (Re G t, Im G t).
            stacked.resize(2 * M_, 2 * L);
            stacked << G.real(), -G.imag(), G.imag(), G.real();
        } else {
            stacked.resize(2 * M_, L);
            stacked << G.real(), G.imag();
        }
        Eigen::JacobiSVD<RMat> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVec& sigma = svd.singularValues();
        Eigen::Index rank = 0;
        while (rank < sigma.size() && sigma(rank) > kReductionTol * sigma(0) && sigma(rank) > 0.0) ++rank;

        const RMat left = svd.matrixU().leftCols(rank) * sigma.head(rank).asDiagonal();
        CMat B(M_, rank);
        B.real() = left.topRows(M_);
        B.imag() = left.bottomRows(M_);
        blocks_.push_back(std::move(B));
        bases_.emplace_back(svd.matrixV().leftCols(rank));
        offsets_.push_back(offset);
        offset += rank;
        for (Eigen::Index r = 0; r < rank; ++r) sigma_all.push_back(sigma(r));
    }
    offsets_.push_back(offset);
    scales_ = Eigen::Map<const RVec>(sigma_all.data(), static_cast<Eigen::Index>(sigma_all.size()));
}

void ReducedOperator::apply(const RVec& v, CVec& out) const {
    if (v.size() != dim()) throw LengthError("reduced vector has wrong length");
    out.resize(outputs());
    for (int k = 0; k < K_; ++k) {
        const CMat& B = blocks_[static_cast<std::size_t>(k)];
        const Eigen::Index off = offsets_[static_cast<std::size_t>(k)];
        for (int i = 0; i < M_; ++i) {
            cplx acc(0.0, 0.0);
            for (Eigen::Index r = 0; r < B.cols(); ++r) acc += B(i, r) * v(off + r);
            out(static_cast<Eigen::Index>(i) * K_ + k) = acc;
        }
    }
    dft_.inverse(out.data(), M_);
}

CVec ReducedOperator::apply(const RVec& v) const {
    CVec out;
    apply(v, out);
    return out;
}

void ReducedOperator::adjoint(const CVec& y, RVec& out) const {
    if (y.size() != outputs()) throw LengthError("output vector has wrong length");
    CVec freq = y;
    dft_.forward(freq.data(), M_);
    out.resize(dim());
    for (int k = 0; k < K_; ++k) {
        const CMat& B = blocks_[static_cast<std::size_t>(k)];
        const Eigen::Index off = offsets_[static_cast<std::size_t>(k)];
        for (Eigen::Index r = 0; r < B.cols(); ++r) {
            double acc = 0.0;
            for (int i = 0; i < M_; ++i) {
                const cplx b = B(i, r);
                const cplx f = freq(static_cast<Eigen::Index>(i) * K_ + k);
                acc += b.real() * f.real() + b.imag() * f.imag();
            }
            out(off + r) = acc;
        }
    }
}

RVec ReducedOperator::adjoint(const CVec& y) const {
    RVec out;
    adjoint(y, out);
    return out;
}

CVec ReducedOperator::expand(const RVec& v) const {
    if (v.size() != dim()) throw LengthError("reduced vector has wrong length");
    const Eigen::Index L = block_len_;
    CVec t = CVec::Zero(L * K_);
    for (int k = 0; k < K_; ++k) {
        const RMat& Z = bases_[static_cast<std::size_t>(k)];
        const Eigen::Index off = offsets_[static_cast<std::size_t>(k)];
        const RVec tau = Z * v.segment(off, Z.cols());
        if (domain_ == CoefficientDomain::Complex) {
            t.segment(k * L, L).real() = tau.head(L);
            t.segment(k * L, L).imag() = tau.tail(L);
        } else {
            t.segment(k * L, L).real() = tau;
        }
    }
    return t;
}

RVec ReducedOperator::restrict(const CVec& t) const {
    const Eigen::Index L = block_len_;
    if (t.size() != L * K_) throw LengthError("coefficient vector has wrong length");
    RVec v(dim());
    for (int k = 0; k < K_; ++k) {
        const RMat& Z = bases_[static_cast<std::size_t>(k)];
        const Eigen::Index off = offsets_[static_cast<std::size_t>(k)];
        RVec tau(Z.rows());
        if (domain_ == CoefficientDomain::Complex) {
            tau << t.segment(k * L, L).real(), t.segment(k * L, L).imag();
        } else {
            tau = t.segment(k * L, L).real();
        }
        v.segment(off, Z.cols()) = Z.transpose() * tau;
    }
    return v;
}

SocpProblem::SocpProblem(const precoder::DesignOperators& ops, const ValidatedConfig& cfg)
    : ops_(ops),
      domain_(cfg.system().t_domain),
      peak_bound_(std::sqrt(cfg.zeta() * cfg.P_s() / cfg.M())),
      ball_coeff_(static_cast<double>(cfg.d_sum()) * cfg.K()),
      gamma_lo_(cfg.system().gamma_floor),
      offset_(to_time_domain(to_antenna_major(ops.b, ops.M, ops.K), ops.M, ops.K)),
      reduced_(ops, domain_) {
    if (ops.M != cfg.M() || ops.K != cfg.K() || ops.c_sum != cfg.c_sum() || ops.d_sum != cfg.d_sum()) {
        throw DimensionError("design operators do not match the configuration");
    }
}

CVec SocpProblem::apply(const CVec& t) const {
    return to_time_domain(to_antenna_major(ops_.apply_G(t), ops_.M, ops_.K), ops_.M, ops_.K);
}

CVec SocpProblem::adjoint(const CVec& y) const {
    const CVec freq = to_subcarrier_major(to_frequency_domain(y, ops_.M, ops_.K), ops_.M, ops_.K);
    const Eigen::Index L = static_cast<Eigen::Index>(ops_.c_sum) * ops_.d_sum;
    CVec out(L * ops_.K);
    for (int k = 0; k < ops_.K; ++k) {
        out.segment(k * L, L).noalias() =
            ops_.G_blocks[static_cast<std::size_t>(k)].adjoint() * freq.segment(static_cast<Eigen::Index>(k) * ops_.M, ops_.M);
    }
    return out;
}

CVec SocpProblem::peak_signal(const CVec& t, double gamma) const {
    return apply(t) + (0.5 * (1.0 + gamma)) * offset_;
}

SocpProblem build_problem(const precoder::DesignOperators& ops, const ValidatedConfig& cfg) {
    return SocpProblem(ops, cfg);
}

}  // namespace parmimo::socp
