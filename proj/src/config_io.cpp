#include "d2d/config_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace d2d {

std::string format_double(double x) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

Rational json_rational(const nlohmann::json& v) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<i64>());
    if (v.is_number_float()) return Rational::parse(format_double(v.get<double>()));
    throw ConfigError("expected a number or \"p/q\" string, got " + v.dump());
}

nlohmann::json rational_json(const Rational& x) {
    if (x.is_integer()) return x.num();
    return x.str();
}

namespace {

i64 get_int(const nlohmann::json& j, const char* key, i64 fallback, bool required) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(std::string("config is missing \"") + key + "\"");
        return fallback;
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string("\"") + key + "\" must be an integer");
    return v.get<i64>();
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        static const char* known[] = {"n", "m", "M", "L", "Lp", "F", "r", "delta", "cr", "seed"};
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown config key \"" + key + "\"");
        (void)value;
    }
    int n = static_cast<int>(get_int(j, "n", 0, true));
    int m = static_cast<int>(get_int(j, "m", 0, true));
    if (!j.contains("M")) throw ConfigError("config is missing \"M\"");
    Rational M = json_rational(j.at("M"));
    int L = static_cast<int>(get_int(j, "L", 1, false));
    int Lp = static_cast<int>(get_int(j, "Lp", 1, false));
    i64 F = get_int(j, "F", 3072, false);
    Rational r = j.contains("r") ? json_rational(j.at("r")) : Rational(2);
    Rational delta = j.contains("delta") ? json_rational(j.at("delta")) : Rational(1);
    CrTable cr;
    if (j.contains("cr")) {
        const auto& steps = j.at("cr");
        if (!steps.is_array()) throw ConfigError("\"cr\" must be an array of [r, rate] pairs");
        for (const auto& step : steps) {
            if (!step.is_array() || step.size() != 2)
                throw ConfigError("\"cr\" entries must be [r, rate] pairs");
            cr.steps.emplace_back(json_rational(step.at(0)), json_rational(step.at(1)));
        }
    }
    RunConfig cfg;
    cfg.params = make_params(n, m, M, L, Lp, F, r, delta, cr);
    i64 seed = get_int(j, "seed", 1, false);
    if (seed < 0) throw ConfigError("\"seed\" must be non-negative");
    cfg.seed = static_cast<u64>(seed);
    return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    const SystemParams& p = cfg.params;
    nlohmann::json j;
    j["n"] = p.n;
    j["m"] = p.m;
    j["M"] = rational_json(p.M);
    j["L"] = p.L;
    j["Lp"] = p.Lp;
    j["F"] = p.F;
    j["r"] = rational_json(p.r);
    j["delta"] = rational_json(p.delta);
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& [radius, rate] : p.cr.steps)
        steps.push_back({rational_json(radius), rational_json(rate)});
    j["cr"] = steps;
    j["seed"] = cfg.seed;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string CsvDoc::str() const {
    std::ostringstream out;
    for (const std::string& line : meta) out << "# " << line << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text;
    if (!out) throw ConfigError("failed writing output file: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace d2d
