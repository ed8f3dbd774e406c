#include "parmimo/config_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "parmimo/errors.hpp"

namespace parmimo {

namespace {

constexpr const char* kFields[] = {"M",     "N",      "J",    "K",           "d",             "c",
                                   "P_s",   "sigma2", "zeta", "gamma_floor", "constellation", "t_domain"};

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& out) {
    if (!doc.contains(key)) return;
    try {
        out = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

SystemConfig system_config_from_json(const nlohmann::json& doc, std::initializer_list<const char*> ignored) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        const auto same = [&](const char* f) { return key == f; };
        if (std::none_of(std::begin(kFields), std::end(kFields), same) &&
            std::none_of(ignored.begin(), ignored.end(), same)) {
            throw ConfigError("unknown config field '" + key + "'");
        }
    }
    SystemConfig cfg;
    read_field(doc, "M", cfg.M);
    read_field(doc, "N", cfg.N);
    read_field(doc, "J", cfg.J);
    read_field(doc, "K", cfg.K);
    read_field(doc, "d", cfg.d);
    read_field(doc, "c", cfg.c);
    read_field(doc, "P_s", cfg.P_s);
    read_field(doc, "sigma2", cfg.sigma2);
    read_field(doc, "zeta", cfg.zeta);
    read_field(doc, "gamma_floor", cfg.gamma_floor);
    std::string name;
    read_field(doc, "constellation", name);
    if (!name.empty()) cfg.constellation = parse_constellation(name);
    name.clear();
    read_field(doc, "t_domain", name);
    if (!name.empty()) cfg.t_domain = parse_coefficient_domain(name);
    return cfg;
}

nlohmann::json to_json(const SystemConfig& cfg) {
    return nlohmann::json{{"M", cfg.M},
                          {"N", cfg.N},
                          {"J", cfg.J},
                          {"K", cfg.K},
                          {"d", cfg.d},
                          {"c", cfg.c},
                          {"P_s", cfg.P_s},
                          {"sigma2", cfg.sigma2},
                          {"zeta", cfg.zeta},
                          {"gamma_floor", cfg.gamma_floor},
                          {"constellation", to_string(cfg.constellation)},
                          {"t_domain", to_string(cfg.t_domain)}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

}  // namespace parmimo
