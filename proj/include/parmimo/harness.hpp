#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parmimo/model.hpp"
#include "parmimo/socp.hpp"

namespace parmimo::harness {

// A config file: SystemConfig fields at top level plus an optional "solver" object.
struct Scenario {
    SystemConfig system;
    socp::SolverOptions solver;
};

Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const socp::SolverOptions& opts);
Scenario load_scenario(const std::filesystem::path& path);

struct TrialRecord {
    long trial_id = 0;
    std::uint64_t seed = 0;  // channel substream seed
    double gamma_hat = 0.0;
    SolveStatus status = SolveStatus::MaxIterations;
    int iterations = 0;
    std::vector<double> per_antenna_par_db;  // empty for infeasible trials
    double par_stacked_db = 0.0;
    double relaxed_measure = 0.0;
    double approx_measure = 0.0;
    double ball_ratio = 0.0;  // ||t||^2 / (d_sum K (1 - gamma)), 1 when gamma = 1
    double gap = 0.0;
    double solver_wall_time = 0.0;
    std::string method;

    bool feasible() const noexcept { return status != SolveStatus::Infeasible; }
    // Ignores solver_wall_time.
    bool operator==(const TrialRecord& other) const;
};

// Channel, BD, design operators, solve, precoder, IDFT and metrics for one
// draw. Deterministic in (master_seed, trial_id).
TrialRecord run_trial(const ValidatedConfig& cfg, std::uint64_t master_seed, long trial_id,
                      const socp::SolverOptions& opts = {});

struct Summary {
    long n_samples = 0;  // per-antenna PAR samples
    double mean_par = 0.0;  // linear
    double var_par = 0.0;  // linear, unbiased
    double mean_par_db = 0.0;
    double var_par_db = 0.0;
    double mean_gamma = 0.0;
    double min_gamma = 0.0;
    double max_snr_cost_db = 0.0;  // -10 log10(min gamma)

    bool operator==(const Summary&) const = default;
};

// Summary statistics by ordered sequential reduction.
Summary summarize(const std::vector<double>& par_samples, const std::vector<double>& gamma_samples);

struct CurvePoint {
    double x = 0.0;
    double p = 0.0;
    bool operator==(const CurvePoint&) const = default;
};

struct ExperimentResult {
    SystemConfig config;
    socp::SolverOptions solver;
    std::uint64_t master_seed = 0;
    long n_trials = 0;
    long n_infeasible = 0;
    long n_max_iterations = 0;  // included in the statistics with their restored feasible point
    std::vector<TrialRecord> records;  // ordered by trial_id
    std::vector<double> gamma_samples;  // feasible trials
    std::vector<double> par_samples;  // linear, feasible trials x M
    Summary summary;
    std::vector<CurvePoint> ccdf_par_db;  // (PAR dB, Pr[PAR >= x])
    std::vector<CurvePoint> cdf_par_db;  // (PAR dB, Pr[PAR <= x])
    std::vector<CurvePoint> cdf_gamma;  // (gamma, Pr[gamma_hat <= x])

    long n_feasible() const noexcept { return n_trials - n_infeasible; }
    double infeasible_fraction() const noexcept { return n_trials > 0 ? static_cast<double>(n_infeasible) / n_trials : 0.0; }
};

using Progress = std::function<void(long done, long total)>;

// Trials run on `parallelism` threads; the result does not depend on it.
ExperimentResult run_experiment(const ValidatedConfig& cfg, long n_trials, std::uint64_t master_seed, int parallelism,
                                const socp::SolverOptions& opts = {}, const Progress& progress = {});

// Recomputes samples, summary and curves from the records.
void aggregate(ExperimentResult& result);

enum class Format { Json, Csv };
Format parse_format(const std::string& name);

// Writes result.json or trials.csv plus the curve files ccdf_par_db.csv,
// cdf_par_db.csv and cdf_gamma.csv into `dir`.
void export_results(const ExperimentResult& result, const std::filesystem::path& dir, Format format);

nlohmann::json to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const nlohmann::json& doc);
ExperimentResult load_result(const std::filesystem::path& file);

// Reads a two-column curve file.
std::vector<CurvePoint> read_curve(const std::filesystem::path& file);
// Value of a right-continuous CCDF curve at x: p of the first point with x_i >= x, 0 past the end.
double evaluate_ccdf_curve(const std::vector<CurvePoint>& curve, double x);

}  // namespace parmimo::harness
