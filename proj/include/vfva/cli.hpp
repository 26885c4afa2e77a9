#pragma once

// Batch commands behind the vfva executable.

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vfva::cli {

enum class Format { text, machine };

struct RunConfig {
    // prove-deltas, replay-elem, check, check-module, implication-matrix,
    // main-theorem, examples-emit, suite
    std::string command;
    std::vector<std::string> inputs;
    std::vector<std::string> axioms;
    std::optional<long> window;
    std::optional<long> m_max;
    // replay-elem instance count
    long count = 100;
    std::uint64_t seed = 0;
    Format format = Format::text;
    std::optional<std::string> out;
    bool timings = false;
};

namespace exit_code {
inline constexpr int pass = 0;
inline constexpr int fail = 1;
inline constexpr int violation = 2;
inline constexpr int config = 3;
} // namespace exit_code

struct Record {
    std::string id;
    std::string anchor;
    std::string verdict;
    nlohmann::json witness;
    std::optional<double> duration;
};

struct RunResult {
    int exit_code = exit_code::pass;
    std::vector<Record> records;
    // Human-readable lines beyond the records (proof traces, errors).
    std::vector<std::string> notes;

    nlohmann::json machine(const RunConfig& cfg) const;
    std::string render(const RunConfig& cfg) const;
};

// Never throws for library errors; they map to exit codes 2 and 3.
RunResult run_command(const RunConfig& cfg);

} // namespace vfva::cli
