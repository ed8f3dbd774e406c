#pragma once

#include <span>
#include <vector>

#include "parmimo/bd.hpp"
#include "parmimo/model.hpp"
#include "parmimo/solution.hpp"

namespace parmimo::precoder {

// Affine data of the design problem for one (channel, symbol) draw.
struct DesignOperators {
    int M = 0;
    int K = 0;
    int c_sum = 0;
    int d_sum = 0;
    std::vector<CMat> G_blocks;  // per subcarrier, M x (c_sum * d_sum)
    CVec b;  // subcarrier-major, index k * M + i
    SymbolBlock symbols;

    long m() const noexcept { return static_cast<long>(c_sum) * d_sum * K; }
    // G t for a wire-order t; subcarrier-major result.
    CVec apply_G(const CVec& t) const;
};

struct PrecoderBundle {
    std::vector<CMat> F_dot_blocks;  // M x d_sum
    std::vector<CMat> F_ddot_blocks;  // M x c_sum
    std::vector<CMat> T_blocks;  // c_sum x d_sum
    std::vector<CMat> F_hat_blocks;  // M x d_sum
    double gamma_hat = 1.0;

    // F_hat s stacked subcarrier-major.
    CVec transmit(const SymbolBlock& symbols) const;
};

std::vector<CMat> build_f_dot(const bd::BdFactors& factors, double gamma);
// Variant with per-user retention factors alpha[j] in (0, 1].
std::vector<CMat> build_f_dot(const bd::BdFactors& factors, std::span<const double> alpha);
std::vector<CMat> build_f_ddot(const bd::BdFactors& factors);

DesignOperators build_design_operators(const bd::BdFactors& factors, const SymbolBlock& symbols,
                                       const ValidatedConfig& cfg);

// T_k for a wire-order t: column l is t_{k,l}.
std::vector<CMat> unstack_coefficients(const CVec& t, int K, int c_sum, int d_sum);

// Throws StateError unless the solution is usable.
PrecoderBundle assemble_precoder(const bd::BdFactors& factors, const SocpSolution& solution,
                                 const ValidatedConfig& cfg);

// Per-user retention factors proportional to weights, clipped at 1 with the
// excess redistributed, such that sum_j alpha_j d_j = gamma_hat * d_sum.
std::vector<double> allocate_user_costs(double gamma_hat, std::span<const int> d, std::span<const double> weights);

}  // namespace parmimo::precoder
