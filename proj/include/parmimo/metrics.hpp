#pragma once

#include <span>
#include <vector>

#include "parmimo/model.hpp"
#include "parmimo/precoder.hpp"

namespace parmimo::metrics {

double to_db(double linear);
double from_db(double db);

// K ||x_i||_inf^2 / ||x_i||^2 for each antenna block of an antenna-major signal.
std::vector<double> par_per_antenna(const CVec& x_time, int M, int K);
std::vector<double> par_per_antenna(const CVec& x_time, const ValidatedConfig& cfg);

// M K ||x||_inf^2 / ||x||^2 over the whole stacked signal.
double par_stacked(const CVec& x_time);

// How the BD part b enters the peak term: sqrt(gamma) b as transmitted, or
// (1 + gamma)/2 b as in the convex relaxation.
enum class OffsetScale { Sqrt, Affine };

// M K ||Q(G t + c(gamma) b)||_inf^2 / (gamma K P_s + P_s ||t||^2 / d_sum).
double relaxed_measure(const CVec& t, double gamma, const precoder::DesignOperators& ops, const ValidatedConfig& cfg,
                       OffsetScale offset = OffsetScale::Sqrt);
// M ||Q(G t + sqrt(gamma) b)||_inf^2 / P_s.
double approx_measure(const CVec& t, double gamma, const precoder::DesignOperators& ops, const ValidatedConfig& cfg);

struct ParReport {
    std::vector<double> per_antenna;
    double stacked_relaxed = 0.0;
    double relaxed_measure = 0.0;
    double approx_measure = 0.0;
    double gamma_hat = 0.0;
    double snr_cost_db = 0.0;  // -10 log10(gamma_hat)
};

ParReport make_report(const CVec& x_time, const CVec& t, double gamma, const precoder::DesignOperators& ops,
                      const ValidatedConfig& cfg);

// Samples sorted once; counting queries by binary search.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples);

    std::size_t size() const noexcept { return sorted_.size(); }
    const std::vector<double>& sorted_samples() const noexcept { return sorted_; }

    double ccdf(double x) const;  // #{s >= x} / n
    double cdf(double x) const;  // #{s <= x} / n
    double cdf_strict(double x) const;  // #{s < x} / n
    // Smallest sample x with ccdf(x) <= p, i.e. the point where the CCDF first drops to p.
    double ccdf_point(double p) const;

private:
    std::vector<double> sorted_;
};

double empirical_ccdf(std::span<const double> samples, double x);
double empirical_cdf(std::span<const double> samples, double x);

// log(pi^{m/2} r^m / Gamma(m/2 + 1)).
double log_ball_volume(long m, double r);
// Fraction of a ball's volume inside radius (1 - eps) r: (1 - eps)^m.
double shell_ratio(long m, double eps);
// Width scale sqrt((1 - gamma) / (c_sum^2 d_sum K)) of the annulus holding the feasible coefficients.
double annulus_width(int c_sum, int d_sum, int K, double gamma);

}  // namespace parmimo::metrics
