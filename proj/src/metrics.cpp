#include "parmimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parmimo/errors.hpp"

namespace parmimo::metrics {

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> par_per_antenna(const CVec& x_time, int M, int K) {
    if (x_time.size() != static_cast<Eigen::Index>(M) * K) throw LengthError("signal length must be M K");
    std::vector<double> out(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
        const auto block = x_time.segment(static_cast<Eigen::Index>(i) * K, K);
        const double power = block.squaredNorm();
        if (power <= 0.0) throw ZeroSignal("antenna " + std::to_string(i) + " carries no power");
        out[static_cast<std::size_t>(i)] = K * block.cwiseAbs2().maxCoeff() / power;
    }
    return out;
}

std::vector<double> par_per_antenna(const CVec& x_time, const ValidatedConfig& cfg) {
    return par_per_antenna(x_time, cfg.M(), cfg.K());
}

double par_stacked(const CVec& x_time) {
    const double power = x_time.squaredNorm();
    if (power <= 0.0) throw ZeroSignal("signal carries no power");
    return static_cast<double>(x_time.size()) * x_time.cwiseAbs2().maxCoeff() / power;
}

namespace {

double peak_power(const CVec& t, double offset_scale, const precoder::DesignOperators& ops) {
    const CVec freq = ops.apply_G(t) + offset_scale * ops.b;
    return to_time_domain(to_antenna_major(freq, ops.M, ops.K), ops.M, ops.K).cwiseAbs2().maxCoeff();
}

}  // namespace

double relaxed_measure(const CVec& t, double gamma, const precoder::DesignOperators& ops, const ValidatedConfig& cfg,
                       OffsetScale offset) {
    const double scale = offset == OffsetScale::Sqrt ? std::sqrt(gamma) : 0.5 * (1.0 + gamma);
    const double K = cfg.K();
    const double denom = gamma * K * cfg.P_s() + cfg.P_s() / cfg.d_sum() * t.squaredNorm();
    return cfg.M() * K * peak_power(t, scale, ops) / denom;
}

double approx_measure(const CVec& t, double gamma, const precoder::DesignOperators& ops, const ValidatedConfig& cfg) {
    return cfg.M() * peak_power(t, std::sqrt(gamma), ops) / cfg.P_s();
}

ParReport make_report(const CVec& x_time, const CVec& t, double gamma, const precoder::DesignOperators& ops,
                      const ValidatedConfig& cfg) {
    ParReport r;
    r.per_antenna = par_per_antenna(x_time, cfg);
    r.stacked_relaxed = par_stacked(x_time);
    r.relaxed_measure = relaxed_measure(t, gamma, ops, cfg);
    r.approx_measure = approx_measure(t, gamma, ops, cfg);
    r.gamma_hat = gamma;
    r.snr_cost_db = -to_db(gamma);
    return r;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw EmptySample("empirical distribution needs at least one sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::ccdf(double x) const {
    const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(sorted_.end() - first) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::cdf(double x) const {
    const auto past = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(past - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::cdf_strict(double x) const {
    const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(first - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::ccdf_point(double p) const {
    // ccdf(sorted_[i]) = (n - i) / n for the first occurrence of each value;
    // ccdf just above the largest sample is 0.
    const auto n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        if (i > 0 && sorted_[i] == sorted_[i - 1]) continue;
        if ((n - static_cast<double>(i)) / n <= p) return sorted_[i];
    }
    return sorted_.back();
}

double empirical_ccdf(std::span<const double> samples, double x) {
    if (samples.empty()) throw EmptySample("empirical CCDF of an empty sample");
    const auto count = std::count_if(samples.begin(), samples.end(), [x](double s) { return s >= x; });
    return static_cast<double>(count) / static_cast<double>(samples.size());
}

double empirical_cdf(std::span<const double> samples, double x) {
    if (samples.empty()) throw EmptySample("empirical CDF of an empty sample");
    const auto count = std::count_if(samples.begin(), samples.end(), [x](double s) { return s <= x; });
    return static_cast<double>(count) / static_cast<double>(samples.size());
}

double log_ball_volume(long m, double r) {
    if (m < 1) throw DimensionError("ball dimension must be at least 1");
    if (!(r > 0.0)) throw RangeError("ball radius must be positive");
    const double half = 0.5 * static_cast<double>(m);
    return half * std::log(std::numbers::pi) + static_cast<double>(m) * std::log(r) - std::lgamma(half + 1.0);
}

double shell_ratio(long m, double eps) {
    if (m < 1) throw DimensionError("ball dimension must be at least 1");
    if (!(eps >= 0.0 && eps < 1.0)) throw RangeError("eps must lie in [0, 1)");
    return std::exp(static_cast<double>(m) * std::log1p(-eps));
}

double annulus_width(int c_sum, int d_sum, int K, double gamma) {
    if (c_sum < 1 || d_sum < 1 || K < 1) throw DimensionError("dimensions must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw RangeError("gamma must lie in (0, 1]");
    return std::sqrt((1.0 - gamma) / (static_cast<double>(c_sum) * c_sum * d_sum * K));
}

}  // namespace parmimo::metrics
