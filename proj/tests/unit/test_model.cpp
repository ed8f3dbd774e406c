#include <doctest.h>

#include <numeric>
#include <set>

#include "parmimo/config_io.hpp"
#include "parmimo/errors.hpp"
#include "parmimo/fft.hpp"
#include "support.hpp"

using namespace parmimo;
using testing::naive_idft;
using testing::random_cvec;

namespace {

// Direct transcription of the admissibility rules for a scenario.
bool admissible(const SystemConfig& c) {
    if (c.M < 1 || c.N < 1 || c.J < 1 || c.K < 2) return false;
    if (static_cast<int>(c.d.size()) != c.J || static_cast<int>(c.c.size()) != c.J) return false;
    if (c.J >= 2 && !((c.J - 1) * c.N < c.M)) return false;
    if (c.J == 1 && !(c.N <= c.M)) return false;
    const int d_sum = std::accumulate(c.d.begin(), c.d.end(), 0);
    if (!(d_sum < c.M)) return false;
    for (int j = 0; j < c.J; ++j) {
        if (c.d[j] < 1 || c.d[j] > c.N) return false;
        if (c.c[j] < 1 || c.c[j] > c.M - (c.J - 1) * c.N - c.d[j]) return false;
    }
    return c.zeta > 1.0;
}

}  // namespace

TEST_CASE("validate_config derives the dimensions of the two-user example") {
    SystemConfig c;
    const auto v = validate_config(c);
    CHECK(v.q() == 2);
    CHECK(v.c_sum() == 2);
    CHECK(v.d_sum() == 2);
    CHECK(v.m() == 2L * 2 * 128);
    CHECK(v.stream_offset(1) == 1);
    CHECK(v.redundant_offset(1) == 1);
}

TEST_CASE("validate_config rejects a redundant count above the null-space dimension") {
    SystemConfig c;
    c.c = {2, 1};
    CHECK_THROWS_AS(validate_config(c), DimensionError);
}

TEST_CASE("validate_config accepts the maximal redundancy at M = 16") {
    SystemConfig c;
    c.M = 16;
    c.c = {13, 13};
    CHECK(validate_config(c).c_sum() == 26);
    c.c = {14, 13};
    CHECK_THROWS_AS(validate_config(c), DimensionError);
}

TEST_CASE("validate_config reports zeta <= 1 as a range error") {
    SystemConfig c;
    c.zeta = 1.0;
    CHECK_THROWS_AS(validate_config(c), RangeError);
}

TEST_CASE("validate_config agrees with a direct inequality check on random tuples") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> small(0, 6);
    int accepted = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        SystemConfig c;
        c.M = small(rng) + 1;
        c.N = small(rng) % 4 + 1;
        c.J = small(rng) % 4 + 1;
        c.K = 2 + small(rng) % 3;
        c.d.resize(c.J);
        c.c.resize(c.J);
        for (int j = 0; j < c.J; ++j) {
            c.d[j] = small(rng) % 4;
            c.c[j] = small(rng) % 5;
        }
        c.zeta = (trial % 17 == 0) ? 0.9 : 1.8;
        const bool expected = admissible(c);
        bool got = true;
        try {
            (void)validate_config(c);
        } catch (const Error&) {
            got = false;
        }
        CHECK(got == expected);
        accepted += expected ? 1 : 0;
    }
    CHECK(accepted > 50);
}

TEST_CASE("constellations have unit average energy") {
    for (auto c : {Constellation::Qpsk, Constellation::Qam16, Constellation::Qam64}) {
        const auto pts = constellation_points(c);
        double energy = 0.0;
        for (const auto& p : pts) energy += std::norm(p);
        CHECK(energy / static_cast<double>(pts.size()) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(constellation_points(Constellation::Qam16).size() == 16);
    CHECK_THROWS_AS(parse_constellation("8psk"), UnsupportedConstellation);
}

TEST_CASE("gen_channels is reproducible and has the documented shape") {
    const auto cfg = validate_config(SystemConfig{});
    const auto a = gen_channels(cfg, 42);
    const auto b = gen_channels(cfg, 42);
    REQUIRE(a.H.size() == 256);
    for (std::size_t i = 0; i < a.H.size(); ++i) {
        CHECK(a.H[i].rows() == 2);
        CHECK(a.H[i].cols() == 4);
        CHECK(a.H[i] == b.H[i]);
    }
    const auto c = gen_channels(cfg, 43);
    CHECK(c.H[0] != a.H[0]);
}

TEST_CASE("channel entries have unit variance and half variance per real part") {
    SystemConfig s;
    s.K = 1 << 15;  // 2^15 x 2 users x 2 x 4 = 2^20 entries
    const auto cfg = validate_config(s);
    const auto ch = gen_channels(cfg, 7);
    double power = 0.0;
    double re2 = 0.0;
    double mean_re = 0.0;
    long n = 0;
    for (const auto& H : ch.H) {
        power += H.cwiseAbs2().sum();
        re2 += H.real().cwiseAbs2().sum();
        mean_re += H.real().sum();
        n += H.size();
    }
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(mean_re / n) < 0.005);
}

TEST_CASE("symbols have per-entry energy P_s / d_sum and near-identity covariance") {
    SystemConfig s;
    s.K = 100000;
    const auto cfg = validate_config(s);
    const auto sym = gen_symbols(cfg, 9);
    REQUIRE(sym.K() == s.K);
    CMat cov = CMat::Zero(2, 2);
    for (const auto& v : sym.s) cov += v * v.adjoint();
    cov /= static_cast<double>(s.K);
    const CMat target = 0.5 * CMat::Identity(2, 2);
    CHECK(std::real(cov(0, 0)) == doctest::Approx(0.5).epsilon(0.02));
    CHECK((cov - target).norm() <= 0.02 * target.norm());

    const auto again = gen_symbols(cfg, 9);
    CHECK(again.s[123] == sym.s[123]);
    CHECK(sym.user_slice(cfg, 1, 5)(0) == sym.s[5](1));

    // Every entry lies on the scaled 16-QAM grid.
    const auto pts = constellation_points(Constellation::Qam16);
    for (int k = 0; k < 50; ++k) {
        double best = 1e9;
        for (const auto& p : pts) best = std::min(best, std::abs(sym.s[k](0) - p * std::sqrt(0.5)));
        CHECK(best < 1e-14);
    }
}

TEST_CASE("unitary DFT matches the naive transform") {
    std::mt19937_64 rng(3);
    for (int K : {2, 3, 8, 64, 100}) {
        const CVec X = random_cvec(K, rng);
        CVec x = X;
        UnitaryDft dft(K);
        dft.inverse(x.data());
        CHECK((x - naive_idft(X)).cwiseAbs().maxCoeff() <= 1e-10);
        dft.forward(x.data());
        CHECK((x - X).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("to_time_domain turns an all-ones block into an impulse") {
    const int M = 2;
    const int K = 16;
    CVec x = CVec::Zero(M * K);
    x.head(K).setOnes();
    const CVec y = to_time_domain(x, M, K);
    CHECK(std::abs(y(0) - std::sqrt(static_cast<double>(K))) < 1e-12);
    CHECK(y.segment(1, M * K - 1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(to_time_domain(CVec::Zero(5), M, K), LengthError);
}

TEST_CASE("to_time_domain preserves norms and transforms each antenna block") {
    std::mt19937_64 rng(5);
    const int M = 3;
    const int K = 64;
    for (int rep = 0; rep < 20; ++rep) {
        const CVec x = random_cvec(M * K, rng);
        const CVec y = to_time_domain(x, M, K);
        CHECK(std::abs(y.norm() - x.norm()) <= 1e-12 * x.norm());
        for (int i = 0; i < M; ++i) {
            CHECK((y.segment(i * K, K) - naive_idft(x.segment(i * K, K))).cwiseAbs().maxCoeff() <= 1e-10);
        }
        CHECK((to_frequency_domain(y, M, K) - x).norm() <= 1e-12 * x.norm());
    }
}

TEST_CASE("layout conversions are inverse permutations") {
    std::mt19937_64 rng(6);
    const int M = 4;
    const int K = 8;
    const CVec x = random_cvec(M * K, rng);
    const CVec a = to_antenna_major(x, M, K);
    CHECK(a(2 * K + 5) == x(5 * M + 2));
    CHECK(to_subcarrier_major(a, M, K) == x);
}

TEST_CASE("substreams differ across trials and streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 100; ++t)
        for (auto s : {Stream::Channel, Stream::Symbols, Stream::Aux}) seen.insert(substream_seed(1, t, s));
    CHECK(seen.size() == 300);
    CHECK(substream_seed(1, 5, Stream::Channel) == substream_seed(1, 5, Stream::Channel));
    CHECK(substream_seed(1, 5, Stream::Channel) != substream_seed(2, 5, Stream::Channel));
}

TEST_CASE("config JSON round trip and strict field checking") {
    SystemConfig c;
    c.M = 8;
    c.c = {5, 4};
    c.zeta = 2.0;
    c.t_domain = CoefficientDomain::Complex;
    c.constellation = Constellation::Qpsk;
    CHECK(system_config_from_json(to_json(c)) == c);
    CHECK_THROWS_AS(system_config_from_json(nlohmann::json{{"Mx", 3}}), ConfigError);
    CHECK_THROWS_AS(system_config_from_json(nlohmann::json{{"M", "four"}}), ConfigError);
    CHECK(system_config_from_json(nlohmann::json{{"K", 64}}).K == 64);
}
