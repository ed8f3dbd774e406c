#include "parmimo/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parmimo/errors.hpp"

namespace parmimo::precoder {

namespace {

int stream_total(const bd::BdFactors& f) {
    int total = 0;
    for (int j = 0; j < f.J; ++j) total += static_cast<int>(f.at(j, 0).V.cols());
    return total;
}

int redundant_total(const bd::BdFactors& f) {
    int total = 0;
    for (int j = 0; j < f.J; ++j) total += static_cast<int>(f.at(j, 0).P.cols());
    return total;
}

}  // namespace

CVec DesignOperators::apply_G(const CVec& t) const {
    const Eigen::Index block = static_cast<Eigen::Index>(c_sum) * d_sum;
    if (t.size() != block * K) throw LengthError("coefficient vector has wrong length");
    CVec out(static_cast<Eigen::Index>(M) * K);
    for (int k = 0; k < K; ++k) {
        out.segment(static_cast<Eigen::Index>(k) * M, M).noalias() =
            G_blocks[static_cast<std::size_t>(k)] * t.segment(k * block, block);
    }
    return out;
}

CVec PrecoderBundle::transmit(const SymbolBlock& symbols) const {
    const auto K = static_cast<int>(F_hat_blocks.size());
    if (symbols.K() != K) throw LengthError("symbol block has wrong subcarrier count");
    const Eigen::Index M = K > 0 ? F_hat_blocks.front().rows() : 0;
    CVec out(M * K);
    for (int k = 0; k < K; ++k) {
        out.segment(k * M, M).noalias() = F_hat_blocks[static_cast<std::size_t>(k)] * symbols.s[static_cast<std::size_t>(k)];
    }
    return out;
}

std::vector<CMat> build_f_dot(const bd::BdFactors& factors, std::span<const double> alpha) {
    if (static_cast<int>(alpha.size()) != factors.J) throw DimensionError("need one retention factor per user");
    for (double a : alpha) {
        if (!(a > 0.0 && a <= 1.0)) throw RangeError("retention factor must lie in (0, 1]");
    }
    const int d_sum = stream_total(factors);
    std::vector<CMat> blocks;
    blocks.reserve(static_cast<std::size_t>(factors.K));
    for (int k = 0; k < factors.K; ++k) {
        const Eigen::Index M = factors.at(0, k).U.rows();
        CMat F(M, d_sum);
        Eigen::Index col = 0;
        for (int j = 0; j < factors.J; ++j) {
            const bd::UserFactors& u = factors.at(j, k);
            F.middleCols(col, u.V.cols()).noalias() = std::sqrt(alpha[static_cast<std::size_t>(j)]) * (u.U * u.V);
            col += u.V.cols();
        }
        blocks.push_back(std::move(F));
    }
    return blocks;
}

std::vector<CMat> build_f_dot(const bd::BdFactors& factors, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw RangeError("gamma must lie in (0, 1]");
    const std::vector<double> alpha(static_cast<std::size_t>(factors.J), gamma);
    return build_f_dot(factors, alpha);
}

std::vector<CMat> build_f_ddot(const bd::BdFactors& factors) {
    const int c_sum = redundant_total(factors);
    std::vector<CMat> blocks;
    blocks.reserve(static_cast<std::size_t>(factors.K));
    for (int k = 0; k < factors.K; ++k) {
        const Eigen::Index M = factors.at(0, k).U.rows();
        CMat F(M, c_sum);
        Eigen::Index col = 0;
        for (int j = 0; j < factors.J; ++j) {
            const bd::UserFactors& u = factors.at(j, k);
            F.middleCols(col, u.P.cols()).noalias() = u.U * u.P;
            col += u.P.cols();
        }
        blocks.push_back(std::move(F));
    }
    return blocks;
}

DesignOperators build_design_operators(const bd::BdFactors& factors, const SymbolBlock& symbols,
                                       const ValidatedConfig& cfg) {
    if (factors.K != cfg.K() || factors.J != cfg.J() || symbols.K() != cfg.K()) {
        throw DimensionError("factors, symbols and configuration disagree");
    }
    DesignOperators ops;
    ops.M = cfg.M();
    ops.K = cfg.K();
    ops.c_sum = cfg.c_sum();
    ops.d_sum = cfg.d_sum();
    ops.symbols = symbols;
    ops.b.resize(static_cast<Eigen::Index>(ops.M) * ops.K);
    ops.G_blocks.reserve(static_cast<std::size_t>(ops.K));

    const auto f_ddot = build_f_ddot(factors);
    const auto f_dot = build_f_dot(factors, 1.0);
    for (int k = 0; k < ops.K; ++k) {
        const CVec& s = symbols.s[static_cast<std::size_t>(k)];
        if (s.size() != ops.d_sum) throw DimensionError("symbol vector length differs from d_sum");
        const CMat& Fdd = f_ddot[static_cast<std::size_t>(k)];
        CMat G(ops.M, static_cast<Eigen::Index>(ops.c_sum) * ops.d_sum);
        for (int l = 0; l < ops.d_sum; ++l) G.middleCols(static_cast<Eigen::Index>(l) * ops.c_sum, ops.c_sum) = s(l) * Fdd;
        ops.G_blocks.push_back(std::move(G));
        ops.b.segment(static_cast<Eigen::Index>(k) * ops.M, ops.M).noalias() = f_dot[static_cast<std::size_t>(k)] * s;
    }
    return ops;
}

std::vector<CMat> unstack_coefficients(const CVec& t, int K, int c_sum, int d_sum) {
    const Eigen::Index block = static_cast<Eigen::Index>(c_sum) * d_sum;
    if (t.size() != block * K) throw LengthError("coefficient vector has wrong length");
    std::vector<CMat> T;
    T.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) T.emplace_back(Eigen::Map<const CMat>(t.data() + k * block, c_sum, d_sum));
    return T;
}

PrecoderBundle assemble_precoder(const bd::BdFactors& factors, const SocpSolution& solution,
                                 const ValidatedConfig& cfg) {
    if (!solution.usable()) throw StateError("cannot assemble a precoder from an infeasible solution");
    PrecoderBundle out;
    out.gamma_hat = solution.gamma_hat;
    out.F_dot_blocks = build_f_dot(factors, solution.gamma_hat);
    out.F_ddot_blocks = build_f_ddot(factors);
    out.T_blocks = unstack_coefficients(solution.t_hat, cfg.K(), cfg.c_sum(), cfg.d_sum());
    out.F_hat_blocks.reserve(out.T_blocks.size());
    for (std::size_t k = 0; k < out.T_blocks.size(); ++k) {
        out.F_hat_blocks.push_back(out.F_dot_blocks[k] + out.F_ddot_blocks[k] * out.T_blocks[k]);
    }
    return out;
}

std::vector<double> allocate_user_costs(double gamma_hat, std::span<const int> d, std::span<const double> weights) {
    if (d.size() != weights.size() || d.empty()) throw DimensionError("d and weights must have the same nonzero length");
    for (double w : weights) {
        if (!(w > 0.0)) throw RangeError("weights must be positive");
    }
    if (!(gamma_hat > 0.0)) throw RangeError("gamma_hat must be positive");
    const double d_sum = std::accumulate(d.begin(), d.end(), 0.0);
    if (gamma_hat > 1.0) throw InfeasibleAllocation("gamma_hat above 1 cannot be met with alpha <= 1");

    const std::size_t J = d.size();
    std::vector<double> alpha(J, 0.0);
    std::vector<bool> clipped(J, false);
    const double target = gamma_hat * d_sum;
    for (std::size_t round = 0; round <= J; ++round) {
        double fixed = 0.0;
        double free_weight = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            if (clipped[j]) fixed += d[j];
            else free_weight += d[j] * weights[j];
        }
        if (free_weight <= 0.0) break;
        const double scale = (target - fixed) / free_weight;
        bool changed = false;
        for (std::size_t j = 0; j < J; ++j) {
            if (clipped[j]) continue;
            alpha[j] = scale * weights[j];
            if (alpha[j] > 1.0) {
                clipped[j] = true;
                changed = true;
            }
        }
        if (!changed) {
            for (std::size_t j = 0; j < J; ++j) {
                if (clipped[j]) alpha[j] = 1.0;
            }
            return alpha;
        }
    }
    for (std::size_t j = 0; j < J; ++j) alpha[j] = clipped[j] ? 1.0 : alpha[j];
    if (std::all_of(clipped.begin(), clipped.end(), [](bool b) { return b; }) && std::abs(target - d_sum) <= 1e-12 * d_sum) {
        return alpha;
    }
    throw InfeasibleAllocation("weights cannot meet the average retention target");
}

}  // namespace parmimo::precoder
