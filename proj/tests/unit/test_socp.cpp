#include <doctest.h>

#include "parmimo/errors.hpp"
#include "parmimo/metrics.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace parmimo;
using testing::make_instance;
using testing::bisection_oracle;
using testing::dense_map;
using testing::feasible_at;

namespace {

socp::SolverOptions with_method(socp::Method m) {
    socp::SolverOptions o;
    o.method = m;
    return o;
}

}  // namespace

TEST_CASE("problem data of the M = 4, K = 128 scenario") {
    const auto inst = make_instance(testing::base_config(128), 1);
    const auto p = socp::build_problem(inst.ops, inst.cfg);
    CHECK(p.peak_cone_count() == 512);
    CHECK(p.cone_count() == 514);
    CHECK(p.peak_bound() == doctest::Approx(std::sqrt(0.45)).epsilon(1e-15));
    CHECK(p.peak_bound() == doctest::Approx(0.6708).epsilon(1e-4));
    CHECK(p.ball_coeff() == 256.0);
    CHECK(p.m() == 512);
    CHECK(p.gamma_lo() == doctest::Approx(0.5 + 1e-9));
    const CVec expected = to_time_domain(to_antenna_major(inst.ops.b, 4, 128), 4, 128);
    CHECK((p.offset() - expected).norm() == 0.0);
}

TEST_CASE("full and reduced operators are adjoint to their transposes") {
    std::mt19937_64 rng(3);
    for (auto domain : {CoefficientDomain::Real, CoefficientDomain::Complex}) {
        for (int M : {4, 8}) {
            SystemConfig s = testing::base_config(16);
            s.M = M;
            s.c = {M - 3, M - 3};
            s.t_domain = domain;
            const auto inst = make_instance(s, 4);
            const auto p = socp::build_problem(inst.ops, inst.cfg);
            const CVec t = testing::random_cvec(p.m(), rng);
            const CVec y = testing::random_cvec(p.peak_cone_count(), rng);
            const cplx lhs = p.apply(t).dot(y);  // <Q G t, y>, conjugating the first argument
            const cplx rhs = t.dot(p.adjoint(y));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));

            const auto& A = p.reduced();
            const RVec v = testing::random_rvec(A.dim(), rng);
            const double l2 = A.apply(v).dot(y).real();
            CHECK(std::abs(l2 - v.dot(A.adjoint(y))) <= 1e-10 * std::abs(l2));

            // Reduced coordinates are an isometry onto the coefficients G can see.
            const CVec tv = A.expand(v);
            CHECK(tv.norm() == doctest::Approx(v.norm()).epsilon(1e-12));
            CHECK((p.apply(tv) - A.apply(v)).norm() <= 1e-10 * v.norm());
            CHECK((A.restrict(tv) - v).norm() <= 1e-10 * v.norm());
            if (domain == CoefficientDomain::Real) CHECK(tv.imag().norm() == 0.0);
            CHECK(A.apply(v).squaredNorm() == doctest::Approx(A.scales().cwiseProduct(v).squaredNorm()).epsilon(1e-10));
            // The projection discards only the part G cannot see.
            const CVec t_dom = domain == CoefficientDomain::Real ? CVec(t.real().cast<cplx>()) : t;
            CHECK((p.apply(A.expand(A.restrict(t_dom))) - p.apply(t_dom)).norm() <= 1e-10 * t_dom.norm());
        }
    }
}

TEST_CASE("zero symbols give gamma 1 and t 0") {
    auto inst = make_instance(testing::base_config(8), 2);
    for (auto& s : inst.symbols.s) s.setZero();
    const auto ops = precoder::build_design_operators(inst.factors, inst.symbols, inst.cfg);
    const auto p = socp::build_problem(ops, inst.cfg);
    const auto sol = socp::solve(p);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.gamma_hat == 1.0);
    CHECK(sol.t_hat.norm() == 0.0);
}

TEST_CASE("a loose peak bound leaves the BD precoder unchanged") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SystemConfig s = testing::base_config(32);
        s.zeta = 1e6;
        const auto inst = make_instance(s, seed);
        const auto p = socp::build_problem(inst.ops, inst.cfg);
        // Peak of Q b against the bound directly.
        REQUIRE(p.offset().cwiseAbs().maxCoeff() <= p.peak_bound());
        const auto sol = socp::solve(p);
        CHECK(sol.status == SolveStatus::Optimal);
        CHECK(sol.gamma_hat == 1.0);
        CHECK(sol.t_hat.norm() == 0.0);
        const auto kkt = socp::check_kkt(p, sol);
        CHECK(kkt.peak_residual <= 0.0);
        CHECK(kkt.ball_residual <= 0.0);
        CHECK(kkt.pass);
    }
}

TEST_CASE("interior-point and ADMM solutions agree and carry certificates") {
    for (int variant = 0; variant < 4; ++variant) {
        SystemConfig s = testing::base_config(variant < 2 ? 64 : 32);
        if (variant % 2 == 1) s.t_domain = CoefficientDomain::Complex;
        if (variant == 3) {
            s.M = 8;
            s.c = {5, 5};
        }
        const auto inst = make_instance(s, 20 + variant);
        const auto p = socp::build_problem(inst.ops, inst.cfg);
        const auto ipm = socp::solve(p, with_method(socp::Method::Ipm));
        const auto admm = socp::solve(p, with_method(socp::Method::Admm));
        REQUIRE(ipm.status == SolveStatus::Optimal);
        REQUIRE(admm.status == SolveStatus::Optimal);
        CHECK(ipm.method == "ipm");
        CHECK(admm.method == "admm");
        CHECK(std::abs(ipm.gamma_hat - admm.gamma_hat) <= 2e-6);
        CHECK(ipm.gamma_hat <= admm.dual_bound + 1e-12);
        CHECK(admm.gamma_hat <= ipm.dual_bound + 1e-12);
        for (const auto* sol : {&ipm, &admm}) {
            const auto kkt = socp::check_kkt(p, *sol);
            CHECK(kkt.peak_residual <= 1e-7);
            CHECK(kkt.ball_residual <= 1e-6);
            CHECK(kkt.gap <= 1e-6);
            CHECK(kkt.pass);
            CHECK(sol->gamma_hat > 0.5);
            CHECK(sol->gamma_hat <= 1.0);
            if (s.t_domain == CoefficientDomain::Real) CHECK(sol->t_hat.imag().norm() == 0.0);
        }
    }
}

TEST_CASE("dual bound of arbitrary multipliers exceeds the optimum") {
    std::mt19937_64 rng(9);
    const auto inst = make_instance(testing::base_config(32), 31);
    const auto p = socp::build_problem(inst.ops, inst.cfg);
    const auto sol = socp::solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(socp::dual_upper_bound(p, sol.peak_dual) == doctest::Approx(sol.dual_bound).epsilon(1e-9));
    for (int rep = 0; rep < 200; ++rep) {
        const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 1)(rng));
        const CVec mu = scale * testing::random_cvec(p.peak_cone_count(), rng);
        CHECK(socp::dual_upper_bound(p, mu) >= sol.gamma_hat - 1e-12);
    }
    CHECK(socp::dual_upper_bound(p, CVec::Zero(p.peak_cone_count())) == 1.0);
    CHECK_THROWS_AS(socp::dual_upper_bound(p, CVec::Zero(3)), LengthError);
}

TEST_CASE("tiny instances match the bisection oracle") {
    SystemConfig s;
    s.M = 2;
    s.N = 2;
    s.J = 1;
    s.K = 2;
    s.d = {1};
    s.c = {1};
    s.zeta = 1.2;
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 400 && compared < 20; ++seed) {
        s.t_domain = compared % 2 == 0 ? CoefficientDomain::Real : CoefficientDomain::Complex;
        const auto inst = make_instance(s, seed);
        const auto p = socp::build_problem(inst.ops, inst.cfg);
        const auto sol = socp::solve(p);
        if (sol.status != SolveStatus::Optimal || sol.method == "trivial") continue;
        const double oracle = bisection_oracle(dense_map(p), p.gamma_lo());
        CAPTURE(seed);
        CHECK(std::abs(sol.gamma_hat - oracle) <= 1e-3);
        ++compared;
    }
    CHECK(compared == 20);
}

TEST_CASE("gamma is monotone in the target PAR") {
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        double previous = -1.0;
        for (double zeta : {1.6, 1.8, 2.2}) {
            SystemConfig s = testing::base_config(16);
            s.zeta = zeta;
            const auto inst = make_instance(s, seed);
            const auto sol = socp::solve(socp::build_problem(inst.ops, inst.cfg));
            if (!sol.usable()) {
                previous = -1.0;
                continue;
            }
            if (sol.gamma_hat < previous - 1e-6) ++violations;
            previous = sol.gamma_hat;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("relaxed PAR at the optimum stays at the target when the ball is tight") {
    int tight = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = make_instance(testing::base_config(64), seed);
        const auto p = socp::build_problem(inst.ops, inst.cfg);
        const auto sol = socp::solve(p);
        REQUIRE(sol.status == SolveStatus::Optimal);
        const double ratio = sol.t_hat.squaredNorm() / (p.ball_coeff() * (1.0 - sol.gamma_hat));
        const double relaxed =
            metrics::relaxed_measure(sol.t_hat, sol.gamma_hat, inst.ops, inst.cfg, metrics::OffsetScale::Affine);
        if (ratio >= 1.0 - 1e-6) {
            ++tight;
            CHECK(relaxed <= inst.cfg.zeta() * (1.0 + 1e-5));
        }
    }
    CHECK(tight >= 18);
}

TEST_CASE("optimal coefficients sit near the ball boundary") {
    int near = 0;
    int counted = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = make_instance(testing::base_config(128), 100 + seed);
        const auto p = socp::build_problem(inst.ops, inst.cfg);
        const auto sol = socp::solve(p);
        if (sol.status != SolveStatus::Optimal || sol.gamma_hat >= 1.0 - 1e-4) continue;
        ++counted;
        const double ratio = sol.t_hat.squaredNorm() / (p.ball_coeff() * (1.0 - sol.gamma_hat));
        if (ratio >= 0.9 && ratio <= 1.0 + 1e-6) ++near;
    }
    REQUIRE(counted > 0);
    CHECK(near >= 0.9 * counted);
}

TEST_CASE("check_kkt flags a violated ball constraint") {
    const auto inst = make_instance(testing::base_config(32), 40);
    const auto p = socp::build_problem(inst.ops, inst.cfg);
    auto sol = socp::solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    REQUIRE(sol.t_hat.norm() > 0.0);
    sol.t_hat *= 1.1;
    const auto kkt = socp::check_kkt(p, sol);
    CHECK(kkt.ball_residual > 1e-6);
    CHECK_FALSE(kkt.pass);
}

TEST_CASE("infeasible draws carry a certificate that the oracle confirms") {
    SystemConfig s;
    s.M = 2;
    s.N = 2;
    s.J = 1;
    s.K = 2;
    s.d = {1};
    s.c = {1};
    s.zeta = 1.2;
    int infeasible = 0;
    for (std::uint64_t seed = 0; seed < 200 && infeasible < 5; ++seed) {
        const auto inst = make_instance(s, seed);
        const auto p = socp::build_problem(inst.ops, inst.cfg);
        const auto sol = socp::solve(p);
        if (sol.status != SolveStatus::Infeasible) continue;
        ++infeasible;
        CAPTURE(seed);
        CHECK(sol.dual_bound < p.gamma_lo());
        CHECK_FALSE(sol.usable());
        CHECK(socp::dual_upper_bound(p, sol.peak_dual) < p.gamma_lo());
        CHECK_FALSE(feasible_at(dense_map(p), p.gamma_lo()));
    }
    CHECK(infeasible == 5);
}

TEST_CASE("iteration limits return a flagged feasible point") {
    const auto inst = make_instance(testing::base_config(64), 50);
    const auto p = socp::build_problem(inst.ops, inst.cfg);
    auto opts = with_method(socp::Method::Ipm);
    opts.max_iter = 3;
    const auto sol = socp::solve(p, opts);
    CHECK(sol.status == SolveStatus::MaxIterations);
    CHECK(sol.iterations <= 3);
    CHECK(sol.usable());
    const auto kkt = socp::check_kkt(p, sol);
    CHECK(kkt.peak_residual <= 1e-7);
    CHECK(kkt.ball_residual <= 1e-6);
}

TEST_CASE("method names") {
    CHECK(socp::parse_method("auto") == socp::Method::Auto);
    CHECK(socp::parse_method("ipm") == socp::Method::Ipm);
    CHECK(socp::parse_method("bisection") == socp::Method::Admm);
    CHECK(socp::parse_method("admm") == socp::Method::Admm);
    CHECK_THROWS(socp::parse_method("simplex"));
}
