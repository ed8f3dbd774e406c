#include "parmimo/invariants.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "parmimo/bd.hpp"
#include "parmimo/precoder.hpp"
#include "parmimo/rng.hpp"

namespace parmimo::invariants {

namespace {

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

CVec random_cvec(Eigen::Index n, Engine& rng) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

}  // namespace

StructuralResiduals structural_residuals(const ValidatedConfig& cfg, std::uint64_t seed) {
    Engine rng = make_engine(substream_seed(seed, 0, Stream::Aux));
    const auto channels = gen_channels(cfg, substream_seed(seed, 0, Stream::Channel));
    const auto symbols = gen_symbols(cfg, substream_seed(seed, 0, Stream::Symbols));
    const auto factors = bd::bd_decompose(channels, cfg);

    SocpSolution sol;
    sol.status = SolveStatus::Optimal;
    sol.gamma_hat = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    sol.t_hat = random_cvec(cfg.m(), rng);
    const auto bundle = precoder::assemble_precoder(factors, sol, cfg);

    StructuralResiduals res;
    for (int k = 0; k < cfg.K(); ++k) {
        const CMat& F = bundle.F_hat_blocks[static_cast<std::size_t>(k)];
        for (int j = 0; j < cfg.J(); ++j) {
            const bd::UserFactors& u = factors.at(j, k);
            if (cfg.J() > 1) {
                const CMat others = bd::stack_interference_channel(channels, j, k);
                res.null_space = std::max(res.null_space, (others * u.U).norm());
            }
            const CMat RH = u.R * channels.at(j, k);
            for (int l = 0; l < cfg.J(); ++l) {
                const CMat block = RH * F.middleCols(cfg.stream_offset(l), cfg.d(l));
                if (l != j) {
                    res.interference = std::max(res.interference, block.norm());
                } else {
                    CMat target = CMat::Zero(cfg.d(j), cfg.d(j));
                    for (int s = 0; s < cfg.d(j); ++s) target(s, s) = std::sqrt(sol.gamma_hat) * u.lambda(s);
                    res.effective_channel = std::max(res.effective_channel, (block - target).norm());
                }
            }
        }
    }
    const SignalBundle signal = make_signal(bundle.transmit(symbols), cfg);
    const double nf = signal.x_freq.norm();
    res.transform_norm = nf > 0.0 ? std::abs(signal.x_time.norm() - nf) / nf : 0.0;
    return res;
}

std::vector<CheckLine> run_invariant_suite(int instances, std::uint64_t seed) {
    std::vector<CheckLine> lines;
    std::vector<SystemConfig> configs;
    {
        SystemConfig a;
        a.K = 16;
        configs.push_back(a);
        SystemConfig b;
        b.M = 8;
        b.K = 8;
        b.c = {5, 5};
        configs.push_back(b);
        SystemConfig c;
        c.M = 7;
        c.N = 2;
        c.J = 3;
        c.K = 8;
        c.d = {1, 2, 1};
        c.c = {1, 1, 2};
        configs.push_back(c);
    }

    StructuralResiduals worst;
    for (int i = 0; i < instances; ++i) {
        const auto cfg = validate_config(configs[static_cast<std::size_t>(i) % configs.size()]);
        const auto r = structural_residuals(cfg, substream_seed(seed, static_cast<std::uint64_t>(i), Stream::Aux));
        worst.null_space = std::max(worst.null_space, r.null_space);
        worst.interference = std::max(worst.interference, r.interference);
        worst.effective_channel = std::max(worst.effective_channel, r.effective_channel);
        worst.transform_norm = std::max(worst.transform_norm, r.transform_norm);
    }
    lines.push_back({"bd_null_space", worst.null_space <= 1e-10, "max " + sci(worst.null_space)});
    lines.push_back({"interference_free", worst.interference <= 1e-9, "max " + sci(worst.interference)});
    lines.push_back({"effective_channel", worst.effective_channel <= 1e-9, "max " + sci(worst.effective_channel)});
    lines.push_back({"transform_norm", worst.transform_norm <= 1e-12, "max " + sci(worst.transform_norm)});

    // Adjointness of the reduced operator and certificates of a few solves.
    SystemConfig small;
    small.K = 32;
    const auto cfg = validate_config(small);
    double adjoint_err = 0.0;
    double worst_peak = 0.0;
    double worst_ball = 0.0;
    double worst_gap = 0.0;
    bool certificates_ok = true;
    const int solves = std::max(1, instances / 10);
    for (int i = 0; i < solves; ++i) {
        const auto trial_seed = substream_seed(seed, static_cast<std::uint64_t>(i), Stream::Symbols);
        const auto channels = gen_channels(cfg, substream_seed(trial_seed, 0, Stream::Channel));
        const auto symbols = gen_symbols(cfg, substream_seed(trial_seed, 0, Stream::Symbols));
        const auto factors = bd::bd_decompose(channels, cfg);
        const auto ops = precoder::build_design_operators(factors, symbols, cfg);
        const auto problem = socp::build_problem(ops, cfg);

        Engine rng = make_engine(trial_seed);
        std::normal_distribution<double> g;
        const auto& A = problem.reduced();
        RVec v(A.dim());
        for (auto& x : v) x = g(rng);
        const CVec y = random_cvec(A.outputs(), rng);
        const double lhs = (A.apply(v).conjugate().cwiseProduct(y)).sum().real();
        const double rhs = v.dot(A.adjoint(y));
        adjoint_err = std::max(adjoint_err, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));

        const auto sol = socp::solve(problem);
        if (sol.status != SolveStatus::Optimal) continue;
        const auto kkt = socp::check_kkt(problem, sol);
        worst_peak = std::max(worst_peak, kkt.peak_residual);
        worst_ball = std::max(worst_ball, kkt.ball_residual);
        worst_gap = std::max(worst_gap, kkt.gap);
        certificates_ok = certificates_ok && kkt.pass;
    }
    lines.push_back({"operator_adjoint", adjoint_err <= 1e-10, "max " + sci(adjoint_err)});
    lines.push_back({"solver_certificates", certificates_ok,
                     "peak " + sci(worst_peak) + " ball " + sci(worst_ball) + " gap " + sci(worst_gap)});
    return lines;
}

}  // namespace parmimo::invariants
