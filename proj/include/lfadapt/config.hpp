#pragma once
// Experiment configuration: flat `key = value` lines grouped under [sections].
// '#' starts a comment. Lists are comma separated; n values accept 2^k.
//
//   [experiment]  name, kind (modulus|minimax|two_space|ladder|continuum),
//                 seed, reps, m, window_frac
//   [functional]  t0
//   [classes]     F1 = <class>, F2 = <class>, ...   (grammar in classes.hpp)
//   [run]         n, eps, panels (1-based class indices for risk panels)
//   [continuum]   alpha_lo, alpha_hi, M, decreasing, probes

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfa {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::string kind = "two_space";
    std::uint64_t seed = 1;
    int reps = 200;
    int m = 2049;
    double window_frac = 0.25;
    double t0 = 0.0;
    std::vector<std::string> classes;  // canonical class strings, F1 first
    std::vector<double> n_values;
    std::vector<double> eps;
    std::vector<int> panels;
    // continuum family
    double alpha_lo = 0.4, alpha_hi = 1.0, M = 1.0;
    bool decreasing = false;
    int probes = 9;
};

// Throws ConfigError naming the line or key. Validation runs before any
// computation: reps >= 100, m >= 3, classes parse, kind-specific counts.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& cfg);

// Stable text form (sorted keys, shortest round-trip numbers) and its FNV-1a hash.
std::string canonical_text(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace lfa
