#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "parmimo/config_io.hpp"
#include "parmimo/errors.hpp"
#include "parmimo/harness.hpp"

namespace parmimo::harness {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    return out;
}

void write_curve(const std::vector<CurvePoint>& curve, const std::filesystem::path& file, const char* header) {
    auto out = open_out(file);
    out << header << '\n';
    for (const auto& pt : curve) out << fmt(pt.x) << ',' << fmt(pt.p) << '\n';
    if (!out) throw IoError("write failed: " + file.string());
}

nlohmann::json curve_json(const std::vector<CurvePoint>& curve) {
    auto arr = nlohmann::json::array();
    for (const auto& pt : curve) arr.push_back({pt.x, pt.p});
    return arr;
}

nlohmann::json record_json(const TrialRecord& r) {
    return nlohmann::json{{"trial_id", r.trial_id},
                          {"seed", r.seed},
                          {"gamma_hat", r.gamma_hat},
                          {"status", to_string(r.status)},
                          {"iterations", r.iterations},
                          {"per_antenna_par_db", r.per_antenna_par_db},
                          {"par_stacked_db", r.par_stacked_db},
                          {"relaxed_measure", r.relaxed_measure},
                          {"approx_measure", r.approx_measure},
                          {"ball_ratio", r.ball_ratio},
                          {"gap", r.gap},
                          {"solver_wall_time", r.solver_wall_time},
                          {"method", r.method}};
}

TrialRecord record_from_json(const nlohmann::json& j) {
    TrialRecord r;
    r.trial_id = j.at("trial_id").get<long>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.gamma_hat = j.at("gamma_hat").get<double>();
    r.status = parse_solve_status(j.at("status").get<std::string>());
    r.iterations = j.at("iterations").get<int>();
    r.per_antenna_par_db = j.at("per_antenna_par_db").get<std::vector<double>>();
    r.par_stacked_db = j.at("par_stacked_db").get<double>();
    r.relaxed_measure = j.at("relaxed_measure").get<double>();
    r.approx_measure = j.at("approx_measure").get<double>();
    r.ball_ratio = j.at("ball_ratio").get<double>();
    r.gap = j.at("gap").get<double>();
    r.solver_wall_time = j.at("solver_wall_time").get<double>();
    r.method = j.at("method").get<std::string>();
    return r;
}

}  // namespace

Format parse_format(const std::string& name) {
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    throw ConfigError("unknown output format '" + name + "' (expected json or csv)");
}

nlohmann::json to_json(const ExperimentResult& result) {
    nlohmann::json doc;
    doc["config"] = to_json(Scenario{result.config, result.solver});
    doc["master_seed"] = result.master_seed;
    doc["n_trials"] = result.n_trials;
    doc["n_infeasible"] = result.n_infeasible;
    doc["n_max_iterations"] = result.n_max_iterations;
    const auto& s = result.summary;
    doc["summary"] = {{"n_samples", s.n_samples},     {"mean_par", s.mean_par},       {"var_par", s.var_par},
                      {"mean_par_db", s.mean_par_db}, {"var_par_db", s.var_par_db},   {"mean_gamma", s.mean_gamma},
                      {"min_gamma", s.min_gamma},     {"max_snr_cost_db", s.max_snr_cost_db}};
    auto records = nlohmann::json::array();
    for (const auto& r : result.records) records.push_back(record_json(r));
    doc["trials"] = std::move(records);
    doc["ccdf_par_db"] = curve_json(result.ccdf_par_db);
    doc["cdf_par_db"] = curve_json(result.cdf_par_db);
    doc["cdf_gamma"] = curve_json(result.cdf_gamma);
    return doc;
}

ExperimentResult result_from_json(const nlohmann::json& doc) {
    ExperimentResult result;
    try {
        const Scenario sc = scenario_from_json(doc.at("config"));
        result.config = sc.system;
        result.solver = sc.solver;
        result.master_seed = doc.at("master_seed").get<std::uint64_t>();
        for (const auto& r : doc.at("trials")) result.records.push_back(record_from_json(r));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed result document: ") + e.what());
    }
    aggregate(result);
    return result;
}

ExperimentResult load_result(const std::filesystem::path& file) { return result_from_json(read_json_file(file)); }

void export_results(const ExperimentResult& result, const std::filesystem::path& dir, Format format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    if (format == Format::Json) {
        auto out = open_out(dir / "result.json");
        out << to_json(result).dump(1) << '\n';
        if (!out) throw IoError("write failed: " + (dir / "result.json").string());
    } else {
        auto out = open_out(dir / "trials.csv");
        out << "trial_id,antenna,par_db,gamma_hat,status\n";
        for (const auto& r : result.records) {
            if (!r.feasible()) continue;
            for (std::size_t i = 0; i < r.per_antenna_par_db.size(); ++i)
                out << r.trial_id << ',' << i << ',' << fmt(r.per_antenna_par_db[i]) << ',' << fmt(r.gamma_hat) << ','
                    << to_string(r.status) << '\n';
        }
        if (!out) throw IoError("write failed: " + (dir / "trials.csv").string());
    }
    write_curve(result.ccdf_par_db, dir / "ccdf_par_db.csv", "par_db,ccdf");
    write_curve(result.cdf_par_db, dir / "cdf_par_db.csv", "par_db,cdf");
    write_curve(result.cdf_gamma, dir / "cdf_gamma.csv", "gamma,cdf");
}

std::vector<CurvePoint> read_curve(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    std::vector<CurvePoint> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed curve line in " + file.string() + ": " + line);
        try {
            out.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw IoError("malformed curve line in " + file.string() + ": " + line);
        }
    }
    return out;
}

double evaluate_ccdf_curve(const std::vector<CurvePoint>& curve, double x) {
    const auto it = std::lower_bound(curve.begin(), curve.end(), x,
                                     [](const CurvePoint& pt, double value) { return pt.x < value; });
    return it == curve.end() ? 0.0 : it->p;
}

}  // namespace parmimo::harness
