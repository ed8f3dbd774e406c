#include "parmimo/model.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "parmimo/errors.hpp"
#include "parmimo/fft.hpp"
#include "parmimo/rng.hpp"

namespace parmimo {

Constellation parse_constellation(std::string_view name) {
    if (name == "qpsk" || name == "4qam") return Constellation::Qpsk;
    if (name == "16qam") return Constellation::Qam16;
    if (name == "64qam") return Constellation::Qam64;
    throw UnsupportedConstellation("unsupported constellation '" + std::string(name) + "'");
}

std::string to_string(Constellation c) {
    switch (c) {
        case Constellation::Qpsk: return "qpsk";
        case Constellation::Qam16: return "16qam";
        case Constellation::Qam64: return "64qam";
    }
    throw UnsupportedConstellation("unknown constellation value");
}

std::vector<cplx> constellation_points(Constellation c) {
    int side = 0;
    switch (c) {
        case Constellation::Qpsk: side = 2; break;
        case Constellation::Qam16: side = 4; break;
        case Constellation::Qam64: side = 8; break;
    }
    if (side == 0) throw UnsupportedConstellation("unknown constellation value");
    // Levels +-1, +-3, ... ; mean energy 2 (side^2 - 1) / 3.
    const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
    std::vector<cplx> points;
    points.reserve(static_cast<std::size_t>(side * side));
    for (int a = 0; a < side; ++a) {
        for (int b = 0; b < side; ++b) {
            points.emplace_back((2 * a - side + 1) * scale, (2 * b - side + 1) * scale);
        }
    }
    return points;
}

CoefficientDomain parse_coefficient_domain(std::string_view name) {
    if (name == "complex") return CoefficientDomain::Complex;
    if (name == "real") return CoefficientDomain::Real;
    throw ConfigError("t_domain must be 'complex' or 'real', got '" + std::string(name) + "'");
}

std::string to_string(CoefficientDomain d) {
    return d == CoefficientDomain::Complex ? "complex" : "real";
}

namespace {

[[noreturn]] void dimension_error(const std::string& what) { throw DimensionError(what); }

std::string describe(const char* lhs, long a, const char* op, long b) {
    std::ostringstream os;
    os << lhs << " (" << a << ") must be " << op << " " << b;
    return os.str();
}

}  // namespace

ValidatedConfig::ValidatedConfig(SystemConfig cfg) : cfg_(std::move(cfg)) {
    q_ = cfg_.M - (cfg_.J - 1) * cfg_.N;
    d_sum_ = std::accumulate(cfg_.d.begin(), cfg_.d.end(), 0);
    c_sum_ = std::accumulate(cfg_.c.begin(), cfg_.c.end(), 0);
    stream_offset_.resize(cfg_.d.size());
    redundant_offset_.resize(cfg_.c.size());
    std::exclusive_scan(cfg_.d.begin(), cfg_.d.end(), stream_offset_.begin(), 0);
    std::exclusive_scan(cfg_.c.begin(), cfg_.c.end(), redundant_offset_.begin(), 0);
}

ValidatedConfig validate_config(const SystemConfig& cfg) {
    if (cfg.M < 1) dimension_error(describe("M", cfg.M, ">=", 1));
    if (cfg.N < 1) dimension_error(describe("N", cfg.N, ">=", 1));
    if (cfg.J < 1) dimension_error(describe("J", cfg.J, ">=", 1));
    if (cfg.K < 2) dimension_error(describe("K", cfg.K, ">=", 2));
    if (static_cast<int>(cfg.d.size()) != cfg.J) dimension_error(describe("length of d", static_cast<long>(cfg.d.size()), "==", cfg.J));
    if (static_cast<int>(cfg.c.size()) != cfg.J) dimension_error(describe("length of c", static_cast<long>(cfg.c.size()), "==", cfg.J));
    if (cfg.J >= 2 && (cfg.J - 1) * cfg.N >= cfg.M) {
        dimension_error(describe("(J-1)*N", (cfg.J - 1) * cfg.N, "<", cfg.M) + " (M)");
    }
    if (cfg.J == 1 && cfg.N > cfg.M) dimension_error(describe("N", cfg.N, "<=", cfg.M) + " (M) for J = 1");

    const int q = cfg.M - (cfg.J - 1) * cfg.N;
    long d_sum = 0;
    for (int j = 0; j < cfg.J; ++j) {
        const int dj = cfg.d[static_cast<std::size_t>(j)];
        const int cj = cfg.c[static_cast<std::size_t>(j)];
        const std::string tag = "[" + std::to_string(j) + "]";
        if (dj < 1) dimension_error(describe(("d" + tag).c_str(), dj, ">=", 1));
        if (dj > cfg.N) dimension_error(describe(("d" + tag).c_str(), dj, "<=", cfg.N) + " (N)");
        if (cj < 1) dimension_error(describe(("c" + tag).c_str(), cj, ">=", 1));
        if (cj > q - dj) dimension_error(describe(("c" + tag).c_str(), cj, "<=", q - dj) + " (M-(J-1)N-d)");
        d_sum += dj;
    }
    if (d_sum >= cfg.M) dimension_error(describe("sum of d", d_sum, "<", cfg.M) + " (M)");

    if (!(cfg.zeta > 1.0)) throw RangeError("zeta must exceed 1");
    if (!(cfg.P_s > 0.0)) throw RangeError("P_s must be positive");
    if (!(cfg.sigma2 > 0.0)) throw RangeError("sigma2 must be positive");
    if (!(cfg.gamma_floor >= 0.5 && cfg.gamma_floor < 1.0)) throw RangeError("gamma_floor must lie in [0.5, 1)");
    return ValidatedConfig(cfg);
}

CVec SymbolBlock::user_slice(const ValidatedConfig& cfg, int j, int k) const {
    if (j < 0 || j >= cfg.J()) throw IndexError("user index out of range");
    return s.at(static_cast<std::size_t>(k)).segment(cfg.stream_offset(j), cfg.d(j));
}

ChannelRealization gen_channels(const ValidatedConfig& cfg, std::uint64_t seed) {
    ChannelRealization ch;
    ch.M = cfg.M();
    ch.N = cfg.N();
    ch.J = cfg.J();
    ch.K = cfg.K();
    ch.seed = seed;
    Engine engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    ch.H.reserve(static_cast<std::size_t>(ch.J) * ch.K);
    for (int k = 0; k < ch.K; ++k) {
        for (int j = 0; j < ch.J; ++j) {
            CMat h(ch.N, ch.M);
            for (int col = 0; col < ch.M; ++col) {
                for (int row = 0; row < ch.N; ++row) {
                    const double re = gauss(engine);
                    const double im = gauss(engine);
                    h(row, col) = cplx(re, im);
                }
            }
            ch.H.push_back(std::move(h));
        }
    }
    return ch;
}

SymbolBlock gen_symbols(const ValidatedConfig& cfg, std::uint64_t seed) {
    const auto points = constellation_points(cfg.system().constellation);
    const double amplitude = std::sqrt(cfg.P_s() / cfg.d_sum());
    Engine engine = make_engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    SymbolBlock block;
    block.seed = seed;
    block.s.reserve(static_cast<std::size_t>(cfg.K()));
    for (int k = 0; k < cfg.K(); ++k) {
        CVec v(cfg.d_sum());
        for (int l = 0; l < cfg.d_sum(); ++l) v(l) = amplitude * points[pick(engine)];
        block.s.push_back(std::move(v));
    }
    return block;
}

namespace {

void check_length(const CVec& x, int M, int K) {
    if (x.size() != static_cast<Eigen::Index>(M) * K) {
        throw LengthError("expected a stacked vector of length " + std::to_string(static_cast<long>(M) * K) +
                          ", got " + std::to_string(x.size()));
    }
}

}  // namespace

CVec to_time_domain(const CVec& x_freq, int M, int K) {
    check_length(x_freq, M, K);
    CVec out = x_freq;
    UnitaryDft(K).inverse(out.data(), M);
    return out;
}

CVec to_time_domain(const CVec& x_freq, const ValidatedConfig& cfg) {
    return to_time_domain(x_freq, cfg.M(), cfg.K());
}

CVec to_frequency_domain(const CVec& x_time, int M, int K) {
    check_length(x_time, M, K);
    CVec out = x_time;
    UnitaryDft(K).forward(out.data(), M);
    return out;
}

CVec to_antenna_major(const CVec& subcarrier_major, int M, int K) {
    check_length(subcarrier_major, M, K);
    CVec out(subcarrier_major.size());
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < M; ++i) out(static_cast<Eigen::Index>(i) * K + k) = subcarrier_major(static_cast<Eigen::Index>(k) * M + i);
    }
    return out;
}

CVec to_subcarrier_major(const CVec& antenna_major, int M, int K) {
    check_length(antenna_major, M, K);
    CVec out(antenna_major.size());
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < M; ++i) out(static_cast<Eigen::Index>(k) * M + i) = antenna_major(static_cast<Eigen::Index>(i) * K + k);
    }
    return out;
}

SignalBundle make_signal(const CVec& x_freq_subcarrier_major, const ValidatedConfig& cfg) {
    SignalBundle bundle;
    bundle.x_freq = to_antenna_major(x_freq_subcarrier_major, cfg.M(), cfg.K());
    bundle.x_time = to_time_domain(bundle.x_freq, cfg);
    return bundle;
}

}  // namespace parmimo
