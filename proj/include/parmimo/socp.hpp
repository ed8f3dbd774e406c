#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "parmimo/fft.hpp"
#include "parmimo/model.hpp"
#include "parmimo/precoder.hpp"
#include "parmimo/solution.hpp"

namespace parmimo::socp {

enum class Method { Auto, Ipm, Admm };

// "bisection" is accepted as an alias of the matrix-free method.
Method parse_method(std::string_view name);
std::string to_string(Method m);

struct SolverOptions {
    int max_iter = 200;  // interior-point iterations
    double tol_feas = 1e-7;
    double tol_gap = 1e-6;
    Method method = Method::Auto;
    int admm_max_iter = 60000;
    long ipm_max_dim = 256;  // Auto uses the interior-point method up to this reduced dimension
    double gamma_min = -1.0;  // lower end of the relaxed gamma range used by the solvers
};

// Linear map v -> Q G Z v onto the subspace of coefficients that G can see.
// Per subcarrier the real-linear map from coefficients to M complex outputs is
// factored by an SVD; v holds the coordinates along its right singular
// vectors, so ||t|| = ||v|| and A^T A is diagonal.
class ReducedOperator {
public:
    ReducedOperator(const precoder::DesignOperators& ops, CoefficientDomain domain);

    int M() const noexcept { return M_; }
    int K() const noexcept { return K_; }
    Eigen::Index dim() const noexcept { return scales_.size(); }
    Eigen::Index outputs() const noexcept { return static_cast<Eigen::Index>(M_) * K_; }

    // Antenna-major time-domain samples.
    void apply(const RVec& v, CVec& out) const;
    CVec apply(const RVec& v) const;
    // Real adjoint: <A v, y>_R = v . adjoint(y).
    void adjoint(const CVec& y, RVec& out) const;
    RVec adjoint(const CVec& y) const;

    // Singular values; A^T A = diag(scales^2).
    const RVec& scales() const noexcept { return scales_; }
    const CMat& block(int k) const { return blocks_.at(static_cast<std::size_t>(k)); }
    Eigen::Index block_offset(int k) const { return offsets_.at(static_cast<std::size_t>(k)); }

    // Wire-order coefficient vector for reduced coordinates, and the
    // orthogonal projection back.
    CVec expand(const RVec& v) const;
    RVec restrict(const CVec& t) const;

private:
    int M_;
    int K_;
    Eigen::Index block_len_ = 0;  // complex coefficients per subcarrier
    CoefficientDomain domain_ = CoefficientDomain::Complex;
    UnitaryDft dft_;
    std::vector<CMat> blocks_;  // M x r_k, frequency-domain columns scaled by singular values
    std::vector<RMat> bases_;  // right singular vectors over the real coefficient coordinates
    std::vector<Eigen::Index> offsets_;
    RVec scales_;
};

// maximize gamma  s.t.  gamma_lo <= gamma <= 1,  ||t||^2 <= ball_coeff (1 - gamma),
//                       |(Q G t + (1 + gamma)/2 Q b)_i| <= peak_bound  for all i.
class SocpProblem {
public:
    SocpProblem(const precoder::DesignOperators& ops, const ValidatedConfig& cfg);

    int M() const noexcept { return ops_.M; }
    int K() const noexcept { return ops_.K; }
    long m() const noexcept { return ops_.m(); }
    CoefficientDomain domain() const noexcept { return domain_; }
    double peak_bound() const noexcept { return peak_bound_; }
    double ball_coeff() const noexcept { return ball_coeff_; }
    double gamma_lo() const noexcept { return gamma_lo_; }
    double gamma_hi() const noexcept { return 1.0; }
    long peak_cone_count() const noexcept { return static_cast<long>(ops_.M) * ops_.K; }
    // Peak cones, the ball cone and the gamma box.
    long cone_count() const noexcept { return peak_cone_count() + 2; }

    // t -> Q G t, antenna-major.
    CVec apply(const CVec& t) const;
    // y -> G^H Q^H y.
    CVec adjoint(const CVec& y) const;
    // Q b, antenna-major.
    const CVec& offset() const noexcept { return offset_; }
    // Q (G t + (1 + gamma)/2 b).
    CVec peak_signal(const CVec& t, double gamma) const;

    const ReducedOperator& reduced() const noexcept { return reduced_; }
    const precoder::DesignOperators& design() const noexcept { return ops_; }

private:
    precoder::DesignOperators ops_;
    CoefficientDomain domain_;
    double peak_bound_;
    double ball_coeff_;
    double gamma_lo_;
    CVec offset_;
    ReducedOperator reduced_;
};

SocpProblem build_problem(const precoder::DesignOperators& ops, const ValidatedConfig& cfg);

SocpSolution solve(const SocpProblem& problem, const SolverOptions& opts = {});

// Upper bound on the optimal gamma from peak multipliers mu (any value is
// valid); gamma is restricted to [gamma_min, 1].
double dual_upper_bound(const SocpProblem& problem, const CVec& mu, double gamma_min = -1.0);

struct KktReport {
    double peak_residual = 0.0;  // max_i (|z_i| - bound) / bound
    double ball_residual = 0.0;  // ||t||^2 - ball_coeff (1 - gamma)
    double box_residual = 0.0;  // max(gamma_lo - gamma, gamma - 1)
    double complementarity = 0.0;  // sum_i |mu_i| (bound - |z_i|) / (bound sum_i |mu_i|)
    double dual_bound = 0.0;
    double gap = 0.0;  // dual_bound - gamma
    bool primal_ok = false;
    bool gap_ok = false;
    bool pass = false;
};

KktReport check_kkt(const SocpProblem& problem, const SocpSolution& solution, const SolverOptions& opts = {});

}  // namespace parmimo::socp
