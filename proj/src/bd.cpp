#include "parmimo/bd.hpp"

#include <algorithm>
#include <numeric>

#include "parmimo/errors.hpp"

namespace parmimo::bd {

CMat null_space_basis(const CMat& A, double rank_tol) {
    const Eigen::Index n = A.cols();
    if (A.rows() == 0) return CMat::Identity(n, n);
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullV);
    const RVec& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > rank_tol * sigma_max) ++rank;

    // Kernel columns of V: rank .. n-1. Indices beyond sigma.size() carry an
    // implicit zero singular value.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n - rank));
    std::iota(order.begin(), order.end(), rank);
    const auto value = [&](Eigen::Index i) { return i < sigma.size() ? sigma(i) : 0.0; };
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return value(a) < value(b); });

    CMat basis(n, n - rank);
    for (std::size_t c = 0; c < order.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(order[c]);
    return basis;
}

CMat stack_interference_channel(const ChannelRealization& channels, int j, int k) {
    if (j < 0 || j >= channels.J) throw IndexError("user index " + std::to_string(j) + " outside [0, J)");
    if (k < 0 || k >= channels.K) throw IndexError("subcarrier index " + std::to_string(k) + " outside [0, K)");
    CMat stacked(static_cast<Eigen::Index>(channels.J - 1) * channels.N, channels.M);
    Eigen::Index row = 0;
    for (int l = 0; l < channels.J; ++l) {
        if (l == j) continue;
        stacked.middleRows(row, channels.N) = channels.at(l, k);
        row += channels.N;
    }
    return stacked;
}

BdFactors bd_decompose(const ChannelRealization& channels, const ValidatedConfig& cfg) {
    if (channels.J != cfg.J() || channels.K != cfg.K() || channels.M != cfg.M() || channels.N != cfg.N()) {
        throw DimensionError("channel realization does not match the configuration");
    }
    BdFactors f;
    f.J = cfg.J();
    f.K = cfg.K();
    f.q = cfg.q();
    f.blocks.resize(static_cast<std::size_t>(f.J) * f.K);
    for (int k = 0; k < f.K; ++k) {
        for (int j = 0; j < f.J; ++j) {
            UserFactors& u = f.at(j, k);
            if (f.J == 1) {
                u.U = CMat::Identity(cfg.M(), cfg.M());
            } else {
                u.U = null_space_basis(stack_interference_channel(channels, j, k));
                if (u.U.cols() != f.q) throw RankDeficiencyError("stacked interference channel is rank deficient");
            }
            u.HU = channels.at(j, k) * u.U;
            Eigen::JacobiSVD<CMat> svd(u.HU, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const RVec& sigma = svd.singularValues();
            const int dj = cfg.d(j);
            if (sigma.size() < dj || sigma(dj - 1) <= kRankTol * sigma(0)) {
                throw RankDeficiencyError("effective channel has rank below the stream count");
            }
            u.lambda = RVec::Zero(cfg.N());
            u.lambda.head(sigma.size()) = sigma;
            u.V = svd.matrixV().leftCols(dj);
            u.R = svd.matrixU().leftCols(dj).adjoint();
        }
    }
    auto projectors = select_null_projectors(f, cfg.c());
    for (std::size_t i = 0; i < projectors.size(); ++i) f.blocks[i].P = std::move(projectors[i]);
    return f;
}

std::vector<CMat> select_null_projectors(const BdFactors& factors, std::span<const int> c) {
    if (static_cast<int>(c.size()) != factors.J) throw DimensionError("need one redundant-dimension count per user");
    std::vector<CMat> out(factors.blocks.size());
    for (int k = 0; k < factors.K; ++k) {
        for (int j = 0; j < factors.J; ++j) {
            const UserFactors& u = factors.at(j, k);
            const int cj = c[static_cast<std::size_t>(j)];
            const CMat kernel = null_space_basis(u.R * u.HU);
            if (cj < 1 || cj > kernel.cols()) {
                throw DimensionError("c[" + std::to_string(j) + "] = " + std::to_string(cj) +
                                     " exceeds the effective-channel null-space dimension " +
                                     std::to_string(kernel.cols()));
            }
            out[static_cast<std::size_t>(k) * factors.J + j] = kernel.leftCols(cj);
        }
    }
    return out;
}

}  // namespace parmimo::bd
