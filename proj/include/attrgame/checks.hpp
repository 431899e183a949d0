#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "attrgame/parallel.hpp"

namespace attrgame {

struct CheckOptions {
    std::string suite = "all";  // all | sg | rg | hellinger | adf | attn
    std::uint64_t seed = 20240817;
    int max_width = 6;
    bool inject_fault = false;  // negative control: mis-scale one discount
    RunMode mode = RunMode::Parallel;
};

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    double max_dev = 0.0;  // worst deviation observed, in the check's own units
    double tolerance = 0.0;
    double seconds = 0.0;  // wall time of the producing check function
    std::string note;
};

// Runs every property in the selected suite; each check pins its tolerance.
std::vector<CheckResult> run_checks(const CheckOptions& opt);

// Deterministic Monte-Carlo mean with a standard error, chunked so serial and
// parallel runs agree bit for bit.
struct McStats {
    double mean = 0.0;
    double se = 0.0;
};

McStats mc_mean(std::uint64_t n, std::uint64_t seed, const std::string& stream,
                double (*sample)(std::mt19937_64&, double, double), double a, double b,
                RunMode mode);

}  // namespace attrgame
