#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "parmimo/bd.hpp"
#include "parmimo/model.hpp"
#include "parmimo/precoder.hpp"
#include "parmimo/rng.hpp"
#include "parmimo/socp.hpp"

namespace testing {

using namespace parmimo;

// Everything derived from one (channel, symbol) draw.
struct Instance {
    ValidatedConfig cfg;
    ChannelRealization channels;
    SymbolBlock symbols;
    bd::BdFactors factors;
    precoder::DesignOperators ops;
};

inline Instance make_instance(const SystemConfig& system, std::uint64_t seed) {
    auto cfg = validate_config(system);
    auto channels = gen_channels(cfg, substream_seed(seed, 0, Stream::Channel));
    auto symbols = gen_symbols(cfg, substream_seed(seed, 0, Stream::Symbols));
    auto factors = bd::bd_decompose(channels, cfg);
    auto ops = precoder::build_design_operators(factors, symbols, cfg);
    return {std::move(cfg), std::move(channels), std::move(symbols), std::move(factors), std::move(ops)};
}

inline CVec random_cvec(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

inline RVec random_rvec(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    RVec v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

inline CMat random_cmat(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    CMat A(rows, cols);
    std::normal_distribution<double> g;
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = {g(rng), g(rng)};
    return A;
}

// Coefficient vector valid for the configured domain.
inline CVec random_coefficients(const ValidatedConfig& cfg, std::mt19937_64& rng) {
    CVec t = random_cvec(cfg.m(), rng);
    if (cfg.system().t_domain == CoefficientDomain::Real) t = t.real().cast<cplx>();
    return t;
}

// Naive unitary inverse DFT: x[n] = K^{-1/2} sum_k X[k] exp(+2 pi i k n / K).
inline CVec naive_idft(const CVec& X) {
    const auto K = X.size();
    CVec x = CVec::Zero(K);
    for (Eigen::Index n = 0; n < K; ++n)
        for (Eigen::Index k = 0; k < K; ++k)
            x(n) += X(k) * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k * n) / static_cast<double>(K));
    return x / std::sqrt(static_cast<double>(K));
}

// Default two-user scenario with a given K.
inline SystemConfig base_config(int K = 32) {
    SystemConfig c;
    c.K = K;
    return c;
}

}  // namespace testing
