#pragma once

// Flat key = value run configuration:
//   F = "sigma_k:2"  n = 2  m = 128  initial = "perturbed_sphere"  initial.params = [1.0, 0.1, 2]
// Strings are double-quoted, arrays hold numbers, '#' starts a comment.

#include "dualflow/flow.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace dualflow {

enum class RunMode { Primal, Dual, Both, Verify };

const char* to_string(RunMode m);

struct RunManifest {
    FlowConfig config;
    RunMode mode = RunMode::Primal;
    double sigma = 0.1;
    std::string out = "out";
    std::uint64_t seed = 0;

    friend bool operator==(const RunManifest& a, const RunManifest& b);
};

/// Throws ParseError naming the offending key or value.
RunManifest parse_config(std::string_view text);

RunManifest load_config(const std::string& path);

/// Inverse of parse_config; numbers are printed with 17 significant digits.
std::string serialize(const RunManifest& manifest);

}  // namespace dualflow
