#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "parmimo/config_io.hpp"
#include "parmimo/errors.hpp"
#include "parmimo/harness.hpp"
#include "parmimo/invariants.hpp"
#include "parmimo/metrics.hpp"

using namespace parmimo;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("parmimo_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

long count_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::string line;
    long n = 0;
    while (std::getline(in, line)) n += line.empty() ? 0 : 1;
    return n;
}

SystemConfig small_config() {
    SystemConfig c;
    c.K = 32;
    return c;
}

}  // namespace

TEST_CASE("run_trial is deterministic and fills the record") {
    const auto cfg = validate_config(small_config());
    const auto a = harness::run_trial(cfg, 99, 3);
    const auto b = harness::run_trial(cfg, 99, 3);
    CHECK(a == b);
    CHECK(a.per_antenna_par_db.size() == 4);
    CHECK(a.status == SolveStatus::Optimal);
    CHECK(a.gamma_hat > 0.5);
    CHECK(a.gamma_hat <= 1.0);
    for (double p : a.per_antenna_par_db) CHECK(p >= 0.0);
    const auto c = harness::run_trial(cfg, 99, 4);
    CHECK(c.gamma_hat != a.gamma_hat);
}

TEST_CASE("a loose target keeps gamma at one") {
    SystemConfig s = small_config();
    s.zeta = 1e6;
    const auto cfg = validate_config(s);
    for (long id = 0; id < 10; ++id) {
        const auto r = harness::run_trial(cfg, 1, id);
        CHECK(r.gamma_hat == 1.0);
        CHECK(r.method == "trivial");
    }
}

TEST_CASE("the SNR cost stays below one decibel for the K = 64 scenario") {
    SystemConfig s;
    s.K = 64;
    const auto cfg = validate_config(s);
    for (long id = 0; id < 30; ++id) CHECK(harness::run_trial(cfg, 5, id).gamma_hat >= 0.8);
}

TEST_CASE("experiment results do not depend on the thread count") {
    const auto cfg = validate_config(small_config());
    const auto serial = harness::run_experiment(cfg, 24, 17, 1);
    const auto parallel = harness::run_experiment(cfg, 24, 17, 8);
    CHECK(serial.records == parallel.records);
    CHECK(serial.summary == parallel.summary);
    CHECK(serial.par_samples == parallel.par_samples);
    CHECK(serial.gamma_samples == parallel.gamma_samples);
    CHECK(serial.ccdf_par_db == parallel.ccdf_par_db);
    CHECK(serial.n_trials == 24);
    CHECK(serial.par_samples.size() == static_cast<std::size_t>(serial.n_feasible()) * 4);
    for (long i = 0; i < 24; ++i) CHECK(serial.records[i].trial_id == i);
    CHECK_THROWS_AS(harness::run_experiment(cfg, 0, 1, 1), RangeError);
}

TEST_CASE("a single trial summarizes to itself") {
    const auto cfg = validate_config(small_config());
    const auto r = harness::run_experiment(cfg, 1, 3, 1);
    const auto& rec = r.records.front();
    CHECK(r.summary.mean_gamma == rec.gamma_hat);
    CHECK(r.summary.min_gamma == rec.gamma_hat);
    double mean = 0.0;
    for (double db : rec.per_antenna_par_db) mean += metrics::from_db(db);
    CHECK(r.summary.mean_par == doctest::Approx(mean / 4.0).epsilon(1e-15));
    CHECK(r.summary.max_snr_cost_db == doctest::Approx(-10.0 * std::log10(rec.gamma_hat)));
}

TEST_CASE("summary is recomputable from the samples") {
    const auto cfg = validate_config(small_config());
    const auto r = harness::run_experiment(cfg, 6, 8, 2);
    CHECK(harness::summarize(r.par_samples, r.gamma_samples) == r.summary);
    double sum = 0.0;
    for (double p : r.par_samples) sum += p;
    CHECK(r.summary.mean_par == doctest::Approx(sum / r.par_samples.size()).epsilon(1e-14));
}

TEST_CASE("infeasible trials are counted and excluded") {
    harness::ExperimentResult r;
    harness::TrialRecord ok;
    ok.trial_id = 0;
    ok.status = SolveStatus::Optimal;
    ok.gamma_hat = 0.9;
    ok.per_antenna_par_db = {2.0, 3.0};
    harness::TrialRecord bad;
    bad.trial_id = 1;
    bad.status = SolveStatus::Infeasible;
    harness::TrialRecord capped = ok;
    capped.trial_id = 2;
    capped.status = SolveStatus::MaxIterations;
    capped.gamma_hat = 0.8;
    r.records = {ok, bad, capped};
    harness::aggregate(r);
    CHECK(r.n_trials == 3);
    CHECK(r.n_infeasible == 1);
    CHECK(r.n_max_iterations == 1);
    CHECK(r.gamma_samples == std::vector<double>{0.9, 0.8});
    CHECK(r.par_samples.size() == 4);
    CHECK(r.infeasible_fraction() == doctest::Approx(1.0 / 3.0));
    CHECK(r.summary.min_gamma == 0.8);
}

TEST_CASE("JSON export round trip") {
    const auto cfg = validate_config(small_config());
    const auto r = harness::run_experiment(cfg, 5, 21, 2);
    const auto dir = scratch("json");
    harness::export_results(r, dir, harness::Format::Json);
    const auto back = harness::load_result(dir / "result.json");
    CHECK(back.summary == r.summary);
    CHECK(back.records == r.records);
    CHECK(back.config == r.config);
    CHECK(back.master_seed == 21);
    CHECK(back.ccdf_par_db == r.ccdf_par_db);
    std::filesystem::remove_all(dir);
}

TEST_CASE("CSV export has one row per feasible antenna sample") {
    const auto cfg = validate_config(small_config());
    auto r = harness::run_experiment(cfg, 7, 2, 2);
    r.records[3].status = SolveStatus::Infeasible;
    harness::aggregate(r);
    const auto dir = scratch("csv");
    harness::export_results(r, dir, harness::Format::Csv);
    CHECK(count_lines(dir / "trials.csv") - 1 == r.n_feasible() * 4);
    CHECK(std::filesystem::exists(dir / "cdf_gamma.csv"));
    CHECK(std::filesystem::exists(dir / "cdf_par_db.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("CCDF curve file reproduces the in-memory estimator") {
    const auto cfg = validate_config(small_config());
    const auto r = harness::run_experiment(cfg, 20, 4, 2);
    const auto dir = scratch("ccdf");
    harness::export_results(r, dir, harness::Format::Csv);
    const auto curve = harness::read_curve(dir / "ccdf_par_db.csv");
    CHECK(curve.size() == r.ccdf_par_db.size());
    std::vector<double> db;
    for (double p : r.par_samples) db.push_back(metrics::to_db(p));
    const metrics::EmpiricalDistribution dist(db);
    for (double x : {metrics::to_db(1.5), metrics::to_db(1.8), metrics::to_db(2.0), -1.0, 10.0}) {
        CHECK(std::abs(harness::evaluate_ccdf_curve(curve, x) - dist.ccdf(x)) <= 1e-12);
    }
    for (double x : dist.sorted_samples()) CHECK(std::abs(harness::evaluate_ccdf_curve(curve, x) - dist.ccdf(x)) <= 1e-12);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(harness::read_curve(dir / "missing.csv"), IoError);
}

TEST_CASE("scenario files carry solver options") {
    const auto doc = nlohmann::json::parse(R"({"M": 8, "c": [5, 5], "zeta": 2.0,
        "solver": {"method": "bisection", "tol_gap": 1e-7, "max_iter": 50}})");
    const auto sc = harness::scenario_from_json(doc);
    CHECK(sc.system.M == 8);
    CHECK(sc.solver.method == socp::Method::Admm);
    CHECK(sc.solver.tol_gap == 1e-7);
    CHECK(sc.solver.max_iter == 50);
    const auto again = harness::scenario_from_json(harness::to_json(sc));
    CHECK(again.system == sc.system);
    CHECK(again.solver.tol_gap == sc.solver.tol_gap);
    CHECK_THROWS_AS(harness::scenario_from_json(nlohmann::json::parse(R"({"solver": {"tol": 1}})")), ConfigError);
    CHECK_THROWS_AS(harness::parse_format("xml"), ConfigError);
}

TEST_CASE("invariant suite passes") {
    for (const auto& line : invariants::run_invariant_suite(12, 3)) {
        CAPTURE(line.name);
        CAPTURE(line.detail);
        CHECK(line.pass);
    }
}
