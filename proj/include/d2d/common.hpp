#pragma once

// Shared aliases and error taxonomy for the D2D coded-caching simulator.
//
// Two error families matter for the CLI exit-code contract:
//   - ConfigError   -> exit code 2 (bad parameters / malformed input)
//   - AssertionError-> exit code 1 (a simulation-time guarantee was violated:
//                      decode mismatch, infeasible slot, missing transmission)
// Statistical outcomes (MDS symbol deficits, rank-deficient hash decodes) are
// reported as data, never thrown.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2d {

using Bytes = std::vector<std::uint8_t>;
using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using i128 = __int128;

// Invalid configuration or parameters (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A correctness guarantee failed at simulation time (CLI exit code 1).
struct AssertionError : std::runtime_error {
    explicit AssertionError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : ConfigError {
    explicit InvalidParams(const std::string& what) : ConfigError("invalid params: " + what) {}
};

struct NonIntegerT : ConfigError {
    explicit NonIntegerT(const std::string& what) : ConfigError("non-integer t: " + what) {}
};

struct TLessThanOne : ConfigError {
    explicit TLessThanOne(const std::string& what) : ConfigError("t below one: " + what) {}
};

struct NotApplicable : ConfigError {
    explicit NotApplicable(const std::string& what) : ConfigError("not applicable: " + what) {}
};

struct NoSolution : ConfigError {
    explicit NoSolution(const std::string& what) : ConfigError("no solution: " + what) {}
};

struct IndivisibleK : ConfigError {
    explicit IndivisibleK(const std::string& what) : ConfigError("indivisible K: " + what) {}
};

struct FieldOverflow : ConfigError {
    explicit FieldOverflow(const std::string& what) : ConfigError("field overflow: " + what) {}
};

struct InsufficientSymbols : ConfigError {
    explicit InsufficientSymbols(const std::string& what)
        : ConfigError("insufficient symbols: " + what) {}
};

struct NoFeasibleCluster : ConfigError {
    explicit NoFeasibleCluster(const std::string& what)
        : ConfigError("no feasible cluster size: " + what) {}
};

struct ZeroSlots : ConfigError {
    explicit ZeroSlots(const std::string& what) : ConfigError("zero slots: " + what) {}
};

struct MissingTransmission : AssertionError {
    explicit MissingTransmission(const std::string& what)
        : AssertionError("missing transmission: " + what) {}
};

struct InfeasibleTransmission : AssertionError {
    explicit InfeasibleTransmission(const std::string& what)
        : AssertionError("infeasible transmission: " + what) {}
};

}  // namespace d2d
