#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "parmimo/errors.hpp"
#include "parmimo/harness.hpp"
#include "parmimo/invariants.hpp"
#include "parmimo/metrics.hpp"

namespace {

using namespace parmimo;

constexpr double kInfeasibleLimit = 0.10;
constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;

struct RunArgs {
    std::string config;
    long trials = 100;
    std::uint64_t seed = 1;
    std::string out = "out";
    int parallel = 0;
    std::string format = "json";
    bool quiet = false;
};

void add_run_options(CLI::App& cmd, RunArgs& args) {
    cmd.add_option("--config", args.config, "JSON scenario file (defaults used when omitted)")->check(CLI::ExistingFile);
    cmd.add_option("--trials", args.trials, "Number of Monte-Carlo trials")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", args.seed, "Master seed");
    cmd.add_option("--out", args.out, "Output directory");
    cmd.add_option("--parallel", args.parallel, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    cmd.add_option("--format", args.format, "Trial table format")->check(CLI::IsMember({"json", "csv"}));
    cmd.add_flag("--quiet", args.quiet, "No progress output");
}

harness::Scenario load(const RunArgs& args) {
    return args.config.empty() ? harness::Scenario{} : harness::load_scenario(args.config);
}

int workers(const RunArgs& args) {
    if (args.parallel > 0) return args.parallel;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

harness::ExperimentResult execute(const harness::Scenario& sc, const RunArgs& args, const std::filesystem::path& out) {
    const auto cfg = validate_config(sc.system);
    harness::Progress progress;
    if (!args.quiet) {
        progress = [step = std::max(1L, args.trials / 20)](long done, long total) {
            if (done % step == 0 || done == total) std::fprintf(stderr, "\r  %ld/%ld trials", done, total);
            if (done == total) std::fputc('\n', stderr);
        };
    }
    auto result = harness::run_experiment(cfg, args.trials, args.seed, workers(args), sc.solver, progress);
    harness::export_results(result, out, harness::parse_format(args.format));
    return result;
}

void print_summary(const harness::ExperimentResult& r) {
    const auto& s = r.summary;
    std::printf("trials %ld  infeasible %ld  max_iterations %ld\n", r.n_trials, r.n_infeasible, r.n_max_iterations);
    std::printf("mean PAR %.4f (%.3f dB)  var %.4g  var_dB %.4g\n", s.mean_par, s.mean_par_db, s.var_par, s.var_par_db);
    std::printf("mean gamma %.4f  min gamma %.4f  worst SNR cost %.3f dB\n", s.mean_gamma, s.min_gamma,
                s.max_snr_cost_db);
}

int cmd_run(const RunArgs& args) {
    const auto result = execute(load(args), args, args.out);
    print_summary(result);
    if (result.infeasible_fraction() > kInfeasibleLimit) {
        std::fprintf(stderr, "more than %.0f%% of trials infeasible\n", 100.0 * kInfeasibleLimit);
        return kExitInfeasible;
    }
    return 0;
}

void set_param(SystemConfig& cfg, const std::string& param, const std::string& value) {
    std::size_t used = 0;
    const auto as_int = [&] {
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw ConfigError("bad integer '" + value + "'");
        return v;
    };
    const auto as_double = [&] {
        const double v = std::stod(value, &used);
        if (used != value.size()) throw ConfigError("bad number '" + value + "'");
        return v;
    };
    if (param == "K") cfg.K = as_int();
    else if (param == "M") cfg.M = as_int();
    else if (param == "N") cfg.N = as_int();
    else if (param == "zeta") cfg.zeta = as_double();
    else if (param == "P_s") cfg.P_s = as_double();
    else throw ConfigError("cannot sweep '" + param + "'");
}

int cmd_sweep(const RunArgs& args, const std::string& param, const std::vector<std::string>& values) {
    const auto base = load(args);
    const std::filesystem::path root(args.out);
    std::filesystem::create_directories(root);
    std::ofstream table(root / "sweep.csv");
    if (!table) throw IoError("cannot write " + (root / "sweep.csv").string());
    table << param << ",n_trials,n_infeasible,mean_par,mean_par_db,var_par_db,mean_gamma,min_gamma,ccdf_1e-2_db\n";
    int code = 0;
    for (const auto& value : values) {
        auto sc = base;
        set_param(sc.system, param, value);
        std::printf("== %s = %s\n", param.c_str(), value.c_str());
        const auto r = execute(sc, args, root / (param + "=" + value));
        print_summary(r);
        double ccdf_point = 0.0;
        if (!r.par_samples.empty()) ccdf_point = metrics::to_db(metrics::EmpiricalDistribution(r.par_samples).ccdf_point(1e-2));
        const auto& s = r.summary;
        table << value << ',' << r.n_trials << ',' << r.n_infeasible << ',' << s.mean_par << ',' << s.mean_par_db << ','
              << s.var_par_db << ',' << s.mean_gamma << ',' << s.min_gamma << ',' << ccdf_point << '\n';
        if (r.infeasible_fraction() > kInfeasibleLimit) code = kExitInfeasible;
    }
    return code;
}

int cmd_check(int instances, std::uint64_t seed) {
    bool ok = true;
    for (const auto& line : invariants::run_invariant_suite(instances, seed)) {
        std::printf("%s %s (%s)\n", line.pass ? "PASS" : "FAIL", line.name.c_str(), line.detail.c_str());
        ok = ok && line.pass;
    }
    return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo simulator for PAR-constrained multi-user MIMO-OFDM precoding"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run a Monte-Carlo experiment");
    add_run_options(*run, run_args);

    RunArgs sweep_args;
    std::string param;
    std::vector<std::string> values;
    auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over values of one parameter");
    add_run_options(*sweep, sweep_args);
    sweep->add_option("--param", param, "Parameter to vary")
        ->required()
        ->check(CLI::IsMember({"K", "M", "N", "zeta", "P_s"}));
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

    int instances = 30;
    std::uint64_t check_seed = 7;
    auto* check = app.add_subcommand("check", "Run the invariant self-check");
    check->add_option("--instances", instances, "Random instances for the structural checks")->check(CLI::PositiveNumber);
    check->add_option("--seed", check_seed, "Seed");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, param, values);
        return cmd_check(instances, check_seed);
    } catch (const parmimo::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
}
