#pragma once
// Monte Carlo risk, rate regression and experiment orchestration.

#include "lfadapt/adaptive.hpp"
#include "lfadapt/config.hpp"
#include "lfadapt/estimators.hpp"
#include "lfadapt/funcspace.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace lfa {

struct RiskReport {
    std::string estimator, f_id;
    double n = 0.0;
    int reps = 0;
    double mse = 0.0;
    double se = 0.0;  // sample SD of the squared errors / sqrt(reps)
    std::uint64_t seed = 0;
};

using EstimateFn = std::function<double(const Observation&)>;

EstimateFn as_estimate_fn(const AffineEstimator& e);

// Replication r observes f through sub-stream (seed, r). reps >= 100.
RiskReport mc_risk(const EstimateFn& est, const FunctionOnGrid& f, const Functional& T, double n, int reps,
                   std::uint64_t seed, const std::string& estimator_id = "", const std::string& f_id = "");

// bias(f)^2 + variance, exact for affine estimators
double affine_risk(const AffineEstimator& e, const FunctionOnGrid& f, const Functional& T, double n);

struct WorstCase {
    RiskReport worst;
    std::vector<RiskReport> table;  // one row per panel member, panel order
};

// Every panel member must lie in `cls` (when given); otherwise
// std::invalid_argument names the first one outside.
WorstCase worst_case_risk(const EstimateFn& est, const std::vector<PanelFunction>& panel, const ConstraintSystem* cls,
                          const Functional& T, double n, int reps, std::uint64_t seed,
                          const std::string& estimator_id = "", double tol = 1e-9);

enum class RateModel { PurePower, PowerWithLog };

struct RateFit {
    RateModel model = RateModel::PurePower;
    double exponent = 0.0;          // slope on log n
    double intercept = 0.0;
    double log_factor_coeff = 0.0;  // slope on log log n (PowerWithLog only)
    double r_squared = 0.0;         // of the requested model
    double r_squared_pure = 0.0;    // pure-power fit on the same data
    double pure_exponent = 0.0;
    std::vector<double> n_values;
};

// Needs >= 4 points, all n > 1, mse > 0 and n_max / n_min >= 4.
RateFit rate_fit(const std::vector<std::pair<double, double>>& points, RateModel model);

// --------------------------------------------------------------- experiments

struct ExperimentResult {
    int status = 0;  // 0 ok, 3 solver failure
    std::string error;
    std::vector<RiskReport> risk_rows;
    std::vector<std::string> artifacts;  // files written, relative to out
    std::string manifest_path;
};

// Runs cfg.kind and writes CSV tables plus manifest.json into out_dir.
// Deterministic given (cfg, seed).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// The hard panel used for class `target` at sample size n: extremal pairs of
// the moduli between `generators` at 1/sqrt n, sqrt(ln gamma_plus / n) and
// sqrt(log n / n), their midpoints and 0.
std::vector<PanelFunction> standard_panel(const std::vector<const ConstraintSystem*>& generators,
                                          const ConstraintSystem& target, const Functional& T, double n,
                                          double gamma_plus, const SolverOptions& opts = {});

}  // namespace lfa
