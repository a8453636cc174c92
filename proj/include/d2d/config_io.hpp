#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "d2d/common.hpp"
#include "d2d/params.hpp"
#include "d2d/rational.hpp"

namespace d2d {

struct RunConfig {
    SystemParams params;
    u64 seed = 1;
};

// Shortest decimal string that strtod parses back to exactly x.
std::string format_double(double x);

// Exact rational from a JSON value: integers directly, strings via
// Rational::parse ("p/q" or a terminating decimal), floats through the
// shortest round-tripping decimal string so 0.4 means 2/5, not the binary
// double underneath.
Rational json_rational(const nlohmann::json& v);

// Inverse: integral rationals as JSON numbers, everything else "p/q".
nlohmann::json rational_json(const Rational& x);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

// Reads and validates a JSON config file; throws ConfigError on I/O or
// schema problems.
RunConfig load_config(const std::string& path);

// CSV with '#'-prefixed metadata lines above the header. Comma separators,
// '.' decimals, LF endings.
struct CsvDoc {
    std::vector<std::string> meta;  // written as "# <line>"
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

// Writes text to path, or to stdout when path is empty.
void write_text(const std::string& path, const std::string& text);

std::string read_text(const std::string& path);

}  // namespace d2d
