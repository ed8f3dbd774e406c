#include "parmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "parmimo/bd.hpp"
#include "parmimo/config_io.hpp"
#include "parmimo/errors.hpp"
#include "parmimo/metrics.hpp"
#include "parmimo/precoder.hpp"
#include "parmimo/rng.hpp"

namespace parmimo::harness {

Scenario scenario_from_json(const nlohmann::json& doc) {
    Scenario s;
    s.system = system_config_from_json(doc, {"solver"});
    if (doc.contains("solver")) {
        const auto& sv = doc.at("solver");
        if (!sv.is_object()) throw ConfigError("'solver' must be an object");
        for (const auto& [key, value] : sv.items()) {
            try {
                if (key == "max_iter") s.solver.max_iter = value.get<int>();
                else if (key == "tol_feas") s.solver.tol_feas = value.get<double>();
                else if (key == "tol_gap") s.solver.tol_gap = value.get<double>();
                else if (key == "method") s.solver.method = socp::parse_method(value.get<std::string>());
                else if (key == "admm_max_iter") s.solver.admm_max_iter = value.get<int>();
                else if (key == "ipm_max_dim") s.solver.ipm_max_dim = value.get<long>();
                else throw ConfigError("unknown solver field '" + key + "'");
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("solver field '" + key + "': " + e.what());
            }
        }
    }
    return s;
}

nlohmann::json to_json(const socp::SolverOptions& opts) {
    return nlohmann::json{{"max_iter", opts.max_iter},
                          {"tol_feas", opts.tol_feas},
                          {"tol_gap", opts.tol_gap},
                          {"method", socp::to_string(opts.method)},
                          {"admm_max_iter", opts.admm_max_iter},
                          {"ipm_max_dim", opts.ipm_max_dim}};
}

nlohmann::json to_json(const Scenario& s) {
    nlohmann::json doc = parmimo::to_json(s.system);
    doc["solver"] = to_json(s.solver);
    return doc;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

bool TrialRecord::operator==(const TrialRecord& o) const {
    return trial_id == o.trial_id && seed == o.seed && gamma_hat == o.gamma_hat && status == o.status &&
           iterations == o.iterations && per_antenna_par_db == o.per_antenna_par_db && par_stacked_db == o.par_stacked_db &&
           relaxed_measure == o.relaxed_measure && approx_measure == o.approx_measure && ball_ratio == o.ball_ratio &&
           gap == o.gap && method == o.method;
}

TrialRecord run_trial(const ValidatedConfig& cfg, std::uint64_t master_seed, long trial_id, const socp::SolverOptions& opts) {
    TrialRecord r;
    r.trial_id = trial_id;
    r.seed = substream_seed(master_seed, static_cast<std::uint64_t>(trial_id), Stream::Channel);
    const auto channels = gen_channels(cfg, r.seed);
    const auto symbols = gen_symbols(cfg, substream_seed(master_seed, static_cast<std::uint64_t>(trial_id), Stream::Symbols));
    const auto factors = bd::bd_decompose(channels, cfg);
    const auto ops = precoder::build_design_operators(factors, symbols, cfg);
    const auto problem = socp::build_problem(ops, cfg);
    const SocpSolution sol = socp::solve(problem, opts);

    r.gamma_hat = sol.gamma_hat;
    r.status = sol.status;
    r.iterations = sol.iterations;
    r.gap = sol.gap;
    r.solver_wall_time = sol.wall_time;
    r.method = sol.method;
    if (!sol.usable()) return r;

    const auto bundle = precoder::assemble_precoder(factors, sol, cfg);
    const SignalBundle signal = make_signal(bundle.transmit(symbols), cfg);
    const auto report = metrics::make_report(signal.x_time, sol.t_hat, sol.gamma_hat, ops, cfg);
    r.per_antenna_par_db.reserve(report.per_antenna.size());
    for (double p : report.per_antenna) r.per_antenna_par_db.push_back(metrics::to_db(p));
    r.par_stacked_db = metrics::to_db(report.stacked_relaxed);
    r.relaxed_measure = report.relaxed_measure;
    r.approx_measure = report.approx_measure;
    const double radius2 = problem.ball_coeff() * (1.0 - sol.gamma_hat);
    r.ball_ratio = radius2 > 0.0 ? sol.t_hat.squaredNorm() / radius2 : 1.0;
    return r;
}

Summary summarize(const std::vector<double>& par_samples, const std::vector<double>& gamma_samples) {
    Summary s;
    s.n_samples = static_cast<long>(par_samples.size());
    const auto mean_var = [](const std::vector<double>& x, auto&& f, double& mean, double& var) {
        mean = 0.0;
        var = 0.0;
        if (x.empty()) return;
        double sum = 0.0;
        for (double v : x) sum += f(v);
        mean = sum / static_cast<double>(x.size());
        if (x.size() < 2) return;
        double ss = 0.0;
        for (double v : x) ss += (f(v) - mean) * (f(v) - mean);
        var = ss / static_cast<double>(x.size() - 1);
    };
    mean_var(par_samples, [](double v) { return v; }, s.mean_par, s.var_par);
    mean_var(par_samples, [](double v) { return metrics::to_db(v); }, s.mean_par_db, s.var_par_db);
    double unused = 0.0;
    mean_var(gamma_samples, [](double v) { return v; }, s.mean_gamma, unused);
    if (!gamma_samples.empty()) {
        s.min_gamma = *std::min_element(gamma_samples.begin(), gamma_samples.end());
        s.max_snr_cost_db = -metrics::to_db(s.min_gamma);
    }
    return s;
}

namespace {

std::vector<CurvePoint> ccdf_curve(const metrics::EmpiricalDistribution& dist, bool to_db) {
    std::vector<CurvePoint> out;
    const auto& xs = dist.sorted_samples();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0 && xs[i] == xs[i - 1]) continue;
        out.push_back({to_db ? metrics::to_db(xs[i]) : xs[i], dist.ccdf(xs[i])});
    }
    return out;
}

std::vector<CurvePoint> cdf_curve(const metrics::EmpiricalDistribution& dist, bool to_db) {
    std::vector<CurvePoint> out;
    const auto& xs = dist.sorted_samples();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i + 1 < xs.size() && xs[i] == xs[i + 1]) continue;
        out.push_back({to_db ? metrics::to_db(xs[i]) : xs[i], dist.cdf(xs[i])});
    }
    return out;
}

}  // namespace

void aggregate(ExperimentResult& result) {
    result.n_trials = static_cast<long>(result.records.size());
    result.n_infeasible = 0;
    result.n_max_iterations = 0;
    result.gamma_samples.clear();
    result.par_samples.clear();
    for (const auto& r : result.records) {
        if (!r.feasible()) {
            ++result.n_infeasible;
            continue;
        }
        if (r.status == SolveStatus::MaxIterations) ++result.n_max_iterations;
        result.gamma_samples.push_back(r.gamma_hat);
        for (double db : r.per_antenna_par_db) result.par_samples.push_back(metrics::from_db(db));
    }
    result.summary = summarize(result.par_samples, result.gamma_samples);
    result.ccdf_par_db.clear();
    result.cdf_par_db.clear();
    result.cdf_gamma.clear();
    if (!result.par_samples.empty()) {
        const metrics::EmpiricalDistribution par(result.par_samples);
        result.ccdf_par_db = ccdf_curve(par, true);
        result.cdf_par_db = cdf_curve(par, true);
    }
    if (!result.gamma_samples.empty()) result.cdf_gamma = cdf_curve(metrics::EmpiricalDistribution(result.gamma_samples), false);
}

ExperimentResult run_experiment(const ValidatedConfig& cfg, long n_trials, std::uint64_t master_seed, int parallelism,
                                const socp::SolverOptions& opts, const Progress& progress) {
    if (n_trials < 1) throw RangeError("need at least one trial");
    const int workers = std::clamp(parallelism, 1, static_cast<int>(std::min<long>(n_trials, 256)));
    ExperimentResult result;
    result.config = cfg.system();
    result.solver = opts;
    result.master_seed = master_seed;
    result.records.resize(static_cast<std::size_t>(n_trials));

    std::atomic<long> next{0};
    std::atomic<long> done{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::mutex progress_mutex;
    const auto work = [&] {
        for (long id = next++; id < n_trials; id = next++) {
            try {
                result.records[static_cast<std::size_t>(id)] = run_trial(cfg, master_seed, id, opts);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n_trials;
                return;
            }
            const long finished = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(finished, n_trials);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    aggregate(result);
    return result;
}

}  // namespace parmimo::harness
