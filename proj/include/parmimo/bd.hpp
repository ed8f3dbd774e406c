#pragma once

#include <span>
#include <vector>

#include "parmimo/model.hpp"
#include "parmimo/types.hpp"

namespace parmimo::bd {

inline constexpr double kRankTol = 1e-10;

// Factors of one (user, subcarrier) pair.
struct UserFactors {
    CMat U;  // M x q, orthonormal basis of the other users' null space
    CMat HU;  // N x q, channel restricted to that null space
    RVec lambda;  // N singular values of H U, descending (zero padded)
    CMat V;  // q x d, leading right singular vectors of H U
    CMat R;  // d x N, leading left singular vectors of H U, as rows
    CMat P;  // q x c, orthonormal basis inside the null space of R H U
};

struct BdFactors {
    int J = 0;
    int K = 0;
    int q = 0;
    std::vector<UserFactors> blocks;  // index k * J + j

    const UserFactors& at(int j, int k) const { return blocks.at(static_cast<std::size_t>(k) * J + j); }
    UserFactors& at(int j, int k) { return blocks.at(static_cast<std::size_t>(k) * J + j); }
};

// Orthonormal kernel basis of A. Singular values at or below
// rank_tol * sigma_max count as zero. Columns are ordered by ascending
// associated singular value, ties by index.
CMat null_space_basis(const CMat& A, double rank_tol = kRankTol);

// Channels of every user except j on subcarrier k, stacked in user order.
// Users are numbered from 0.
CMat stack_interference_channel(const ChannelRealization& channels, int j, int k);

BdFactors bd_decompose(const ChannelRealization& channels, const ValidatedConfig& cfg);

// First c[j] null-space basis vectors of R H U for every (j, k), index k * J + j.
// Throws DimensionError if some c[j] exceeds q - d_j.
std::vector<CMat> select_null_projectors(const BdFactors& factors, std::span<const int> c);

}  // namespace parmimo::bd
