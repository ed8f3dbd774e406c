#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "parmimo/types.hpp"

namespace parmimo {

enum class Constellation { Qpsk, Qam16, Qam64 };

Constellation parse_constellation(std::string_view name);
std::string to_string(Constellation c);

// Unit average energy square QAM alphabet.
std::vector<cplx> constellation_points(Constellation c);

// Whether the redundant-dimension coefficients t are complex or real valued.
enum class CoefficientDomain { Complex, Real };

CoefficientDomain parse_coefficient_domain(std::string_view name);
std::string to_string(CoefficientDomain d);

struct SystemConfig {
    int M = 4;  // transmit antennas
    int N = 2;  // antennas per user
    int J = 2;  // users
    int K = 128;  // subcarriers
    std::vector<int> d{1, 1};  // streams per user
    std::vector<int> c{1, 1};  // redundant dimensions per user
    double P_s = 1.0;  // total signal power per subcarrier
    double sigma2 = 1.0;  // noise variance, reporting only
    double zeta = 1.8;  // target PAR, linear
    double gamma_floor = 0.5 + 1e-9;
    Constellation constellation = Constellation::Qam16;
    CoefficientDomain t_domain = CoefficientDomain::Real;

    bool operator==(const SystemConfig&) const = default;
};

// A SystemConfig that passed validation, with derived dimensions.
class ValidatedConfig {
public:
    const SystemConfig& system() const noexcept { return cfg_; }

    int M() const noexcept { return cfg_.M; }
    int N() const noexcept { return cfg_.N; }
    int J() const noexcept { return cfg_.J; }
    int K() const noexcept { return cfg_.K; }
    int d(int j) const { return cfg_.d.at(static_cast<std::size_t>(j)); }
    int c(int j) const { return cfg_.c.at(static_cast<std::size_t>(j)); }
    const std::vector<int>& d() const noexcept { return cfg_.d; }
    const std::vector<int>& c() const noexcept { return cfg_.c; }
    double P_s() const noexcept { return cfg_.P_s; }
    double zeta() const noexcept { return cfg_.zeta; }

    int q() const noexcept { return q_; }
    int d_sum() const noexcept { return d_sum_; }
    int c_sum() const noexcept { return c_sum_; }
    long m() const noexcept { return static_cast<long>(c_sum_) * d_sum_ * cfg_.K; }
    // Offset of user j's first stream inside a per-subcarrier symbol vector.
    int stream_offset(int j) const { return stream_offset_.at(static_cast<std::size_t>(j)); }
    int redundant_offset(int j) const { return redundant_offset_.at(static_cast<std::size_t>(j)); }

    friend ValidatedConfig validate_config(const SystemConfig& cfg);

private:
    explicit ValidatedConfig(SystemConfig cfg);

    SystemConfig cfg_;
    int q_ = 0;
    int d_sum_ = 0;
    int c_sum_ = 0;
    std::vector<int> stream_offset_;
    std::vector<int> redundant_offset_;
};

// Throws DimensionError or RangeError naming the violated condition.
ValidatedConfig validate_config(const SystemConfig& cfg);

struct ChannelRealization {
    int M = 0;
    int N = 0;
    int J = 0;
    int K = 0;
    std::vector<CMat> H;  // N x M, index k * J + j
    std::uint64_t seed = 0;

    const CMat& at(int j, int k) const { return H.at(static_cast<std::size_t>(k) * J + j); }
};

struct SymbolBlock {
    std::vector<CVec> s;  // per subcarrier, length d_sum
    std::uint64_t seed = 0;

    int K() const noexcept { return static_cast<int>(s.size()); }
    // Streams of user j on subcarrier k.
    CVec user_slice(const ValidatedConfig& cfg, int j, int k) const;
};

struct SignalBundle {
    CVec x_freq;  // antenna-major, index i * K + k
    CVec x_time;  // antenna-major, per-antenna unitary IDFT of x_freq
};

ChannelRealization gen_channels(const ValidatedConfig& cfg, std::uint64_t seed);
SymbolBlock gen_symbols(const ValidatedConfig& cfg, std::uint64_t seed);

// Per-antenna unitary inverse DFT of an antenna-major stacked vector.
CVec to_time_domain(const CVec& x_freq, int M, int K);
CVec to_time_domain(const CVec& x_freq, const ValidatedConfig& cfg);
CVec to_frequency_domain(const CVec& x_time, int M, int K);

// Reorder subcarrier-major (k * M + i) to antenna-major (i * K + k) and back.
CVec to_antenna_major(const CVec& subcarrier_major, int M, int K);
CVec to_subcarrier_major(const CVec& antenna_major, int M, int K);

SignalBundle make_signal(const CVec& x_freq_subcarrier_major, const ValidatedConfig& cfg);

}  // namespace parmimo
